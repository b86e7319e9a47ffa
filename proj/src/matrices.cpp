#include "liftpm/matrices.hpp"

#include <algorithm>
#include <cmath>

#include "liftpm/errors.hpp"

namespace liftpm {

GraphMatrices build_matrices(const Multigraph& G) {
  const int g = G.vertex_count();
  const int h = G.edge_count();
  GraphMatrices M;
  M.adjacency.assign(g, std::vector<long>(g, 0));
  M.incidence.assign(g, std::vector<long>(h, 0));
  M.directed_incidence.assign(g, std::vector<long>(h, 0));
  M.degrees.assign(g, 0);
  for (int e = 0; e < h; ++e) {
    const auto& [u, v] = G.edge(e);
    M.adjacency[u][v] += 1;
    M.adjacency[v][u] += 1;
    M.incidence[u][e] = 1;
    M.incidence[v][e] = 1;
    M.directed_incidence[u][e] = 1;
    M.directed_incidence[v][e] = -1;
    M.degrees[u] += 1;
    M.degrees[v] += 1;
  }
  M.alphas = symmetric_eigenvalues(to_eigen(M.adjacency));
  return M;
}

bool matrix_identities_hold(const GraphMatrices& M) {
  const int g = static_cast<int>(M.adjacency.size());
  const int h = static_cast<int>(M.incidence.empty() ? 0 : M.incidence[0].size());
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      long undirected = 0;
      long directed = 0;
      for (int e = 0; e < h; ++e) {
        undirected += M.incidence[i][e] * M.incidence[j][e];
        directed += M.directed_incidence[i][e] * M.directed_incidence[j][e];
      }
      const long diag = (i == j) ? M.degrees[i] : 0;
      if (undirected != M.adjacency[i][j] + diag) return false;
      if (directed != diag - M.adjacency[i][j]) return false;
    }
  }
  return true;
}

std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& M) {
  const int n = static_cast<int>(M.rows());
  if (M.cols() != n) throw validation_error("eigenvalue input must be square");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(M(i, j) - M(j, i)) > 1e-12 * std::max(1.0, M.cwiseAbs().maxCoeff()))
        throw validation_error("eigenvalue input must be symmetric");

  Eigen::MatrixXd a = M;
  const auto off_norm = [&]() {
    double s = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 128 && off_norm() >= 1e-12; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end(), std::greater<double>());
  return eig;
}

Eigen::MatrixXd to_eigen(const std::vector<std::vector<long>>& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows[0].size());
  Eigen::MatrixXd M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = static_cast<double>(rows[i][j]);
  return M;
}

}  // namespace liftpm
