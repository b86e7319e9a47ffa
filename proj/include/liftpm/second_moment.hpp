#pragma once

#include <string>
#include <vector>

#include "liftpm/factored.hpp"
#include "liftpm/laplace.hpp"
#include "liftpm/lattice.hpp"
#include "liftpm/matrices.hpp"
#include "liftpm/multigraph.hpp"

namespace liftpm {

// Per-edge fiber split of a matching pair: edges of F_e in M1\M2, M2\M1,
// neither, and both (the diagonal count l_iee).
struct EdgeStu {
  long s = 0;
  long t = 0;
  long u = 0;
  long diag = 0;
};

// s/t/u of edge e read off the endpoint given by the stored orientation.
EdgeStu edge_stu(const Multigraph& G, const PairIndex& P, const std::vector<long>& ell, int e);

// Expected number of matching pairs with the given (i,e,f) counts:
// n!^(g-h) * prod_e s_e! t_e! u_e! / l_ee!  *  prod_i prod_{e != f} 1/l_ief!.
// The per-endpoint square-root factors pair up across the two ends of each
// edge, so only integer factorials arise. Validates membership in the
// constraint set.
Rat term_a2(const Multigraph& G, const PairIndex& P, long n, const std::vector<long>& ell);

// Vertex totals plus the three per-edge compatibility families, as an
// enumeration system with rhs (n, ..., n, 0, ..., 0).
CosetSystem second_moment_system(const Multigraph& G, const PairIndex& P);

// Exact E[X_G^2] at lift size n by constraint backtracking.
Rat exact_second_moment(const Multigraph& G, long n, std::uint64_t node_cap = 10'000'000);

SectionObjective second_moment_objective(const Multigraph& G, const PairIndex& P);

LaplaceProblem second_moment_problem(const Multigraph& G, const GraphMatrices& M,
                                     const LatticeReport& L2);

struct Phi2MaximizerReport {
  MaximizeResult opt;
  double deviation_from_uniform = 0.0;  // max |x0 - 1/d^2|
  double phi_expected = 0.0;            // g ln((d-1)^(d-1)/d^(d-2))
  std::string status;                   // "proven" (d=3) or "heuristic-unique"/"unresolved"
};

// Locates the maximizer of the pair objective and checks it against the
// uniform point; proven for 3-regular graphs, heuristic multistart evidence
// otherwise.
Phi2MaximizerReport verify_phi2_maximizer(const Multigraph& G, const GraphMatrices& M);

struct SecondMomentAsymptotics {
  AsymptoticEstimate analytic;  // assembled at the exact uniform maximizer
  AsymptoticEstimate engine;   // fully numeric assembly from the located maximum
  double rel_gap = 0.0;
  std::string maximizer_status;
};

SecondMomentAsymptotics asymptotic_second_moment(const Multigraph& G, const GraphMatrices& M);

}  // namespace liftpm
