#include "liftpm/exact.hpp"

#include <sstream>

#include "liftpm/errors.hpp"

namespace liftpm {

IntMat IntMat::identity(int n) {
  IntMat I(n, n);
  for (int i = 0; i < n; ++i) I.at(i, i) = 1;
  return I;
}

IntMat IntMat::from_rows(const std::vector<std::vector<Int>>& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows[0].size());
  IntMat M(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c)
      throw validation_error("ragged rows in matrix construction");
    for (int j = 0; j < c; ++j) M.at(i, j) = rows[i][j];
  }
  return M;
}

IntMat IntMat::from_long_rows(const std::vector<std::vector<long>>& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows[0].size());
  IntMat M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M.at(i, j) = rows[i][j];
  return M;
}

std::vector<Int> IntMat::row(int i) const {
  std::vector<Int> out(cols_);
  for (int j = 0; j < cols_; ++j) out[j] = at(i, j);
  return out;
}

std::vector<std::vector<Int>> IntMat::to_rows() const {
  std::vector<std::vector<Int>> out(rows_);
  for (int i = 0; i < rows_; ++i) out[i] = row(i);
  return out;
}

void IntMat::swap_rows(int i, int j) {
  if (i == j) return;
  for (int k = 0; k < cols_; ++k) std::swap(at(i, k), at(j, k));
}

std::string IntMat::str() const {
  std::ostringstream out;
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) out << at(i, j) << (j + 1 == cols_ ? "" : " ");
    out << "\n";
  }
  return out.str();
}

IntMat transpose(const IntMat& A) {
  IntMat T(A.cols(), A.rows());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) T.at(j, i) = A.at(i, j);
  return T;
}

IntMat mul(const IntMat& A, const IntMat& B) {
  if (A.cols() != B.rows()) throw validation_error("matrix product dimension mismatch");
  IntMat C(A.rows(), B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int k = 0; k < A.cols(); ++k) {
      if (A.at(i, k) == 0) continue;
      for (int j = 0; j < B.cols(); ++j) C.at(i, j) += A.at(i, k) * B.at(k, j);
    }
  return C;
}

Int determinant(IntMat A) {
  if (A.rows() != A.cols()) throw validation_error("determinant of non-square matrix");
  const int n = A.rows();
  if (n == 0) return 1;
  Int prev = 1;
  int sign = 1;
  for (int k = 0; k + 1 < n; ++k) {
    if (A.at(k, k) == 0) {
      int pivot = -1;
      for (int i = k + 1; i < n; ++i)
        if (A.at(i, k) != 0) {
          pivot = i;
          break;
        }
      if (pivot < 0) return 0;
      A.swap_rows(k, pivot);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        Int num = A.at(i, j) * A.at(k, k) - A.at(i, k) * A.at(k, j);
        mpz_divexact(A.at(i, j).get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
      }
      A.at(i, k) = 0;
    }
    prev = A.at(k, k);
  }
  return sign > 0 ? A.at(n - 1, n - 1) : Int(-A.at(n - 1, n - 1));
}

IntMat gram_matrix(const std::vector<std::vector<Int>>& vectors) {
  const int m = static_cast<int>(vectors.size());
  IntMat G(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      if (vectors[i].size() != vectors[j].size())
        throw validation_error("gram matrix of vectors with mixed dimensions");
      Int dot = 0;
      for (std::size_t k = 0; k < vectors[i].size(); ++k) dot += vectors[i][k] * vectors[j][k];
      G.at(i, j) = dot;
      G.at(j, i) = dot;
    }
  }
  return G;
}

namespace {

// Combined row operation [r1; r2] <- [[s, t], [-b/g, a/g]] [r1; r2], the
// unimodular step of the extended-gcd column elimination.
void gcd_rows(IntMat& m, IntMat& u, int r1, int r2, int col) {
  const Int a = m.at(r1, col);
  const Int b = m.at(r2, col);
  Int g, s, t;
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  const Int af = a / g;
  const Int bf = b / g;
  for (auto* mat : {&m, &u}) {
    for (int j = 0; j < mat->cols(); ++j) {
      const Int x = mat->at(r1, j);
      const Int y = mat->at(r2, j);
      mat->at(r1, j) = s * x + t * y;
      mat->at(r2, j) = af * y - bf * x;
    }
  }
}

void negate_row(IntMat& m, IntMat& u, int r) {
  for (int j = 0; j < m.cols(); ++j) m.at(r, j) = -m.at(r, j);
  for (int j = 0; j < u.cols(); ++j) u.at(r, j) = -u.at(r, j);
}

void sub_multiple(IntMat& m, IntMat& u, int target, int source, const Int& q) {
  if (q == 0) return;
  for (int j = 0; j < m.cols(); ++j) m.at(target, j) -= q * m.at(source, j);
  for (int j = 0; j < u.cols(); ++j) u.at(target, j) -= q * u.at(source, j);
}

}  // namespace

HermiteForm hermite_normal_form(const IntMat& A) {
  HermiteForm out;
  out.h = A;
  out.transform = IntMat::identity(A.rows());
  IntMat& H = out.h;
  IntMat& U = out.transform;
  int r = 0;
  for (int col = 0; col < A.cols() && r < A.rows(); ++col) {
    int first = -1;
    for (int i = r; i < A.rows(); ++i)
      if (H.at(i, col) != 0) {
        first = i;
        break;
      }
    if (first < 0) continue;
    if (first != r) {
      H.swap_rows(r, first);
      U.swap_rows(r, first);
    }
    for (int i = r + 1; i < A.rows(); ++i)
      if (H.at(i, col) != 0) gcd_rows(H, U, r, i, col);
    if (H.at(r, col) < 0) negate_row(H, U, r);
    for (int i = 0; i < r; ++i) {
      Int q;
      mpz_fdiv_q(q.get_mpz_t(), H.at(i, col).get_mpz_t(), H.at(r, col).get_mpz_t());
      sub_multiple(H, U, i, r, q);
    }
    ++r;
  }
  out.rank = r;
  return out;
}

int matrix_rank(const IntMat& A) { return hermite_normal_form(A).rank; }

std::vector<Int> smith_elementary_divisors(IntMat A) {
  const int m = A.rows();
  const int n = A.cols();
  std::vector<Int> divisors;
  int t = 0;
  while (true) {
    int pi = -1, pj = -1;
    Int best;
    for (int i = t; i < m; ++i)
      for (int j = t; j < n; ++j)
        if (A.at(i, j) != 0) {
          Int mag = abs(A.at(i, j));
          if (pi < 0 || mag < best) {
            best = mag;
            pi = i;
            pj = j;
          }
        }
    if (pi < 0) break;
    A.swap_rows(t, pi);
    for (int i = 0; i < m; ++i) std::swap(A.at(i, t), A.at(i, pj));

    bool clean = false;
    while (!clean) {
      clean = true;
      for (int i = t + 1; i < m; ++i) {
        if (A.at(i, t) == 0) continue;
        Int q = A.at(i, t) / A.at(t, t);
        for (int j = t; j < n; ++j) A.at(i, j) -= q * A.at(t, j);
        if (A.at(i, t) != 0) {
          A.swap_rows(t, i);
          clean = false;
        }
      }
      for (int j = t + 1; j < n; ++j) {
        if (A.at(t, j) == 0) continue;
        Int q = A.at(t, j) / A.at(t, t);
        for (int i = t; i < m; ++i) A.at(i, j) -= q * A.at(i, t);
        if (A.at(t, j) != 0) {
          for (int i = 0; i < m; ++i) std::swap(A.at(i, t), A.at(i, j));
          clean = false;
        }
      }
      if (clean) {
        // enforce divisibility of the remaining block by the pivot
        for (int i = t + 1; i < m && clean; ++i)
          for (int j = t + 1; j < n && clean; ++j)
            if (A.at(i, j) % A.at(t, t) != 0) {
              for (int k = t; k < n; ++k) A.at(t, k) += A.at(i, k);
              clean = false;
            }
      }
    }
    divisors.push_back(abs(A.at(t, t)));
    ++t;
    if (t >= m || t >= n) break;
  }
  return divisors;
}

std::vector<std::vector<Int>> integer_kernel(const IntMat& M) {
  const int N = M.cols();
  const HermiteForm hf = hermite_normal_form(transpose(M));
  std::vector<std::vector<Int>> raw;
  for (int i = hf.rank; i < N; ++i) raw.push_back(hf.transform.row(i));
  if (raw.empty()) return raw;
  // canonical basis of the kernel lattice
  const HermiteForm canon = hermite_normal_form(IntMat::from_rows(raw));
  std::vector<std::vector<Int>> basis;
  for (int i = 0; i < canon.rank; ++i) basis.push_back(canon.h.row(i));
  return basis;
}

std::optional<std::vector<Rat>> solve_rational(const IntMat& A, const std::vector<Rat>& b) {
  const int m = A.rows();
  const int n = A.cols();
  if (static_cast<int>(b.size()) != m)
    throw validation_error("solve_rational dimension mismatch");
  std::vector<std::vector<Rat>> w(m, std::vector<Rat>(n + 1));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) w[i][j] = Rat(A.at(i, j));
    w[i][n] = b[i];
  }
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < n && r < m; ++c) {
    int p = -1;
    for (int i = r; i < m; ++i)
      if (w[i][c] != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(w[r], w[p]);
    const Rat inv = w[r][c];
    for (int j = c; j <= n; ++j) w[r][j] /= inv;
    for (int i = 0; i < m; ++i) {
      if (i == r || w[i][c] == 0) continue;
      const Rat f = w[i][c];
      for (int j = c; j <= n; ++j) w[i][j] -= f * w[r][j];
    }
    pivot_col.push_back(c);
    ++r;
  }
  for (int i = r; i < m; ++i)
    if (w[i][n] != 0) return std::nullopt;
  std::vector<Rat> x(n, Rat(0));
  for (int i = 0; i < r; ++i) x[pivot_col[i]] = w[i][n];
  return x;
}

}  // namespace liftpm
