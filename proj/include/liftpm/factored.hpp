#pragma once

#include <map>
#include <string>

#include "liftpm/exact.hpp"

namespace liftpm {

// A positive real in the form prod p^e(p) * pi^e_pi with rational exponents,
// used to carry constants like 2^10 * 3^-3/2 * 5^-1 exactly alongside their
// decimal value.
struct Factored {
  std::map<Int, Rat> prime_exp;
  Rat pi_exp = Rat(0);

  static Factored one() { return {}; }

  // Multiplies by value^e; value must be a positive integer, which is
  // factored by trial division.
  void mul_int_pow(Int value, const Rat& e);
  void mul_rat_pow(const Rat& value, const Rat& e);
  void mul_pi_pow(const Rat& e) { pi_exp += e; }
  void mul(const Factored& other);

  double to_double() const;
  std::string str() const;  // e.g. "2^10 * 3^-3/2 * 5^-1 * pi^1/2"
};

}  // namespace liftpm
