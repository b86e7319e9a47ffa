#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "liftpm/exact.hpp"
#include "liftpm/factored.hpp"
#include "liftpm/matrices.hpp"
#include "liftpm/multigraph.hpp"

namespace liftpm {

// Directed-edge adjacency with U-turns forbidden. Directed edge 2e points
// along the stored orientation of edge e, 2e+1 against it.
struct NBMatrix {
  int dim = 0;
  std::vector<std::vector<int>> entries;  // 0/1

  static int forward(int e) { return 2 * e; }
  static int backward(int e) { return 2 * e + 1; }
};

NBMatrix nb_matrix(const Multigraph& G);

// Closed non-backtracking walk counts w_1..w_kmax, computed by exact trace
// iteration and checked against the adjacency-spectrum closed form (rounded
// to the nearest integer); index 0 is unused.
std::vector<Int> walk_counts(const Multigraph& G, const GraphMatrices& M, int kmax);

struct SscResult {
  double eld_value = 0.0;  // (d-1)^{dg} det((d-1)^2 I - R)^{-1/2}
  double cw_value = 0.0;   // adjacency-spectrum product form
  Factored factored;       // exact factorization of the constant
  bool paths_agree = false;
};

// The small-subgraph-conditioning constant exp(sum_k lambda_k delta_k^2),
// evaluated through the two independent determinant routes; they must agree
// to 1e-9 (and the underlying integer determinants satisfy the exact
// characteristic-polynomial identity).
SscResult ssc_constant(const Multigraph& G, const GraphMatrices& M);

struct CycleSpectrum {
  int kmax = 0;
  std::vector<Int> w;          // w[k], k = 1..kmax
  std::vector<double> lambda;  // lambda[k] = w_k / 2k
  std::vector<double> delta;   // (-1/(d-1))^k
  std::vector<double> mu;      // (1 + delta_k) lambda_k
  double ssc = 0.0;
  Factored ssc_factored;
  double truncation_tail_bound = 0.0;  // geometric bound on sum_{k>kmax} lambda_k delta_k^2
};

CycleSpectrum cycle_series(const Multigraph& G, const GraphMatrices& M, int kmax);

struct A4Report {
  double lhs = 0.0;  // limiting constant of E[X^2]/(E X)^2
  double rhs = 0.0;  // SSC constant
  Rat power_excess = Rat(0);  // p2 - 2 p1, must vanish
  bool power_cancel = false;
  bool pass = false;
};

// Checks that the moment-ratio constant equals the SSC constant (the
// second-moment closure of the conditioning method) to 1e-6 relative.
A4Report a4_check(const Multigraph& G, const GraphMatrices& M);

// Samples of the limit variable prod_k (1+delta_k)^{Y_k} e^{-lambda_k delta_k}
// with independent Y_k ~ Po(lambda_k), truncated at kmax; stream keyed by
// (seed, k, trial).
std::vector<double> sample_limit_W(const Multigraph& G, const GraphMatrices& M, int kmax,
                                   int count, std::uint64_t seed);

}  // namespace liftpm
