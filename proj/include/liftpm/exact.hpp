#pragma once

#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace liftpm {

using Int = mpz_class;
using Rat = mpq_class;

inline Rat make_rat(const Int& num, const Int& den) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// Dense matrix of arbitrary-precision integers.
class IntMat {
 public:
  IntMat() = default;
  IntMat(int rows, int cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
  static IntMat identity(int n);
  static IntMat from_rows(const std::vector<std::vector<Int>>& rows);
  static IntMat from_long_rows(const std::vector<std::vector<long>>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Int& at(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const Int& at(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  std::vector<Int> row(int i) const;
  std::vector<std::vector<Int>> to_rows() const;
  void swap_rows(int i, int j);
  std::string str() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Int> a_;
};

IntMat transpose(const IntMat& A);
IntMat mul(const IntMat& A, const IntMat& B);

// Exact determinant by Bareiss fraction-free elimination. det of a 0x0
// matrix is 1.
Int determinant(IntMat A);

// Gram matrix of a list of vectors sharing an ambient dimension.
IntMat gram_matrix(const std::vector<std::vector<Int>>& vectors);

struct HermiteForm {
  IntMat h;          // row-style HNF: U * A = h
  IntMat transform;  // unimodular U
  int rank = 0;      // nonzero rows of h (they come first)
};

// Row-style Hermite normal form with pivot columns chosen leftmost-first,
// positive pivots, and entries above each pivot reduced into [0, pivot).
HermiteForm hermite_normal_form(const IntMat& A);

int matrix_rank(const IntMat& A);

// Nonzero elementary divisors d1 | d2 | ... of A (Smith normal form diagonal).
std::vector<Int> smith_elementary_divisors(IntMat A);

// Basis of the integer kernel {v in Z^N : M v = 0} as rows, brought to a
// canonical HNF basis. The result is saturated: it spans ker(M) ∩ Z^N.
std::vector<std::vector<Int>> integer_kernel(const IntMat& M);

// Solves A x = b over the rationals. Returns nullopt when inconsistent;
// free variables (if any) are set to zero.
std::optional<std::vector<Rat>> solve_rational(const IntMat& A, const std::vector<Rat>& b);

}  // namespace liftpm
