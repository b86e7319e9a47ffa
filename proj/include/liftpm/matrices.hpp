#pragma once

#include <vector>

#include <Eigen/Dense>

#include "liftpm/multigraph.hpp"

namespace liftpm {

// The three integer matrices of a multigraph plus the adjacency spectrum.
struct GraphMatrices {
  std::vector<std::vector<long>> adjacency;           // A, g x g, entry = multiplicity
  std::vector<std::vector<long>> incidence;           // Ahat, g x h, two 1s per column
  std::vector<std::vector<long>> directed_incidence;  // Adir, g x h, +1 source / -1 target
  std::vector<long> degrees;                          // diagonal of D
  std::vector<double> alphas;                         // eigenvalues of A, descending
};

GraphMatrices build_matrices(const Multigraph& G);

// Verifies Ahat*Ahat^T == A + D and Adir*Adir^T == D - A in integer arithmetic.
bool matrix_identities_hold(const GraphMatrices& M);

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
// Sweeps run in a fixed (p,q) order until the off-diagonal Frobenius norm
// drops below 1e-12. Rejects non-symmetric input.
std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& M);

Eigen::MatrixXd to_eigen(const std::vector<std::vector<long>>& rows);

}  // namespace liftpm
