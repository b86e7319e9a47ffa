#pragma once

#include <optional>
#include <vector>

#include "liftpm/factored.hpp"
#include "liftpm/laplace.hpp"
#include "liftpm/lattice.hpp"
#include "liftpm/matrices.hpp"
#include "liftpm/multigraph.hpp"

namespace liftpm {

// Fractional perfect matching: nonnegative rational edge weights with unit
// sum at every vertex. Regular graphs get the uniform 1/d vector; otherwise
// a rational feasible point is found by exact phase-1 simplex (Bland's
// rule), or nullopt when none exists.
std::optional<std::vector<Rat>> fractional_pm(const Multigraph& G);

// Expected number of perfect matchings with l_e fiber edges over edge e:
// n!^(g-h) * prod_e (n-l_e)!/l_e!. Validates the vertex-sum constraints.
Rat term_a1(const Multigraph& G, long n, const std::vector<long>& ell);

// Vertex-sum constraint system Ahat * l = n * 1.
CosetSystem first_moment_system(const Multigraph& G, const GraphMatrices& M);

// Exact E[X_G] at lift size n (0 when no valid fiber vector exists).
Rat exact_first_moment(const Multigraph& G, const GraphMatrices& M, long n,
                       std::uint64_t node_cap = 10'000'000);

// phi, gradient, Hessian, psi of the first-moment summand field.
SectionObjective first_moment_objective(const Multigraph& G);

// psi evaluated at a lattice point scaled by n, with zero factors x_e or
// 1-x_e replaced by 1/n; this is how the subexponential factor is read off
// boundary terms when validating summands.
double psi_at_term(const Multigraph& G, long n, const std::vector<long>& ell);

LaplaceProblem first_moment_problem(const Multigraph& G, const GraphMatrices& M,
                                    const LatticeReport& L1);

struct FirstMomentAsymptotics {
  AsymptoticEstimate closed_form;  // closed-form constants (primary)
  AsymptoticEstimate engine;       // independent numeric assembly
  double rel_gap = 0.0;            // |engine C / closed C - 1|
  Factored symbolic;               // exact factorization of the constant
  MaximizeResult opt;
};

// Closed-form asymptotic E[X_G] for d-regular G (d >= 3), cross-assembled
// through the Laplace engine; the two constants must agree to 1e-9.
FirstMomentAsymptotics asymptotic_first_moment(const Multigraph& G, const GraphMatrices& M);

}  // namespace liftpm
