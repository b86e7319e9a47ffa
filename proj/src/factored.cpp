#include "liftpm/factored.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "liftpm/errors.hpp"

namespace liftpm {

void Factored::mul_int_pow(Int value, const Rat& e) {
  if (value <= 0) throw validation_error("Factored handles positive integers only");
  if (e == 0 || value == 1) return;
  for (Int p = 2; p * p <= value;) {
    if (value % p == 0) {
      Rat& slot = prime_exp[p];
      do {
        slot += e;
        value /= p;
      } while (value % p == 0);
      if (slot == 0) prime_exp.erase(p);
    }
    p += (p == 2) ? 1 : 2;
  }
  if (value > 1) {
    Rat& slot = prime_exp[value];
    slot += e;
    if (slot == 0) prime_exp.erase(value);
  }
}

void Factored::mul_rat_pow(const Rat& value, const Rat& e) {
  mul_int_pow(value.get_num(), e);
  mul_int_pow(value.get_den(), Rat(-e));
}

void Factored::mul(const Factored& other) {
  for (const auto& [p, e] : other.prime_exp) {
    Rat& slot = prime_exp[p];
    slot += e;
    if (slot == 0) prime_exp.erase(p);
  }
  pi_exp += other.pi_exp;
}

double Factored::to_double() const {
  double log_value = 0.0;
  for (const auto& [p, e] : prime_exp)
    log_value += e.get_d() * std::log(p.get_d());
  log_value += pi_exp.get_d() * std::log(std::numbers::pi);
  return std::exp(log_value);
}

std::string Factored::str() const {
  std::ostringstream out;
  bool first = true;
  const auto emit = [&](const std::string& base, const Rat& e) {
    if (!first) out << " * ";
    first = false;
    out << base;
    if (e != 1) {
      out << "^";
      if (e.get_den() == 1) {
        out << e.get_num();
      } else {
        out << e.get_num() << "/" << e.get_den();
      }
    }
  };
  for (const auto& [p, e] : prime_exp) emit(p.get_str(), e);
  if (pi_exp != 0) emit("pi", pi_exp);
  if (first) out << "1";
  return out.str();
}

}  // namespace liftpm
