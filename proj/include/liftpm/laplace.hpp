#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "liftpm/exact.hpp"
#include "liftpm/lattice.hpp"

namespace liftpm {

// Scalar field on the open box (0,1)^N with analytic derivatives, plus the
// subexponential correction factor psi.
struct SectionObjective {
  std::function<double(const Eigen::VectorXd&)> phi;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hess;
  std::function<double(const Eigen::VectorXd&)> psi;
};

// b_n = constant * (2 pi n)^power.
struct BnSpec {
  double constant = 1.0;
  Rat power = Rat(0);
};

// Affine-section maximization instance: maximize phi over K ∩ (start + V)
// where K = [0,1]^N and V is spanned by the lattice.
struct LaplaceProblem {
  int ambient_dim = 0;
  Lattice lattice;
  Eigen::VectorXd start;  // strictly interior feasible point; empty => use analytic center
  SectionObjective f;
  BnSpec b_n;
};

struct MaximizeResult {
  Eigen::VectorXd x0;
  double phi0 = 0.0;
  double grad_residual = 0.0;
  int iterations = 0;
  bool multistart_agreement = true;
  int multistart_runs = 0;
  double multistart_spread = 0.0;
};

// Newton iteration in section coordinates with a backtracking line search
// that keeps iterates strictly inside the box (margin 1e-12). Converges to
// projected gradient norm < 1e-12 or throws. The multistart pass reports
// whether all runs land within 1e-8 of the same point.
MaximizeResult maximize_on_section(const LaplaceProblem& problem, int multistarts = 100,
                                   std::uint64_t seed = 0x5eedULL);

// det(-H restricted to V) for the subspace V spanned by the basis rows:
// det(-z_i^T H z_j) / det(<z_i, z_j>). Invariant under change of basis.
double hessian_restricted_det(const Eigen::MatrixXd& H,
                              const std::vector<std::vector<Int>>& basis);

struct HypothesisAudit {
  bool interior = false;
  bool psi_positive = false;
  bool hessian_negative_definite = false;
  std::string failure;
  bool ok() const { return interior && psi_positive && hessian_negative_definite; }
};

struct AsymptoticEstimate {
  double constant = 0.0;       // C
  Rat poly_power = Rat(0);     // p, so the estimate is C * n^p * exp(n * rate)
  double exp_rate = 0.0;
  double det_neg_hess_restricted = 1.0;
  Rat vol_squared = Rat(1);
  std::vector<double> x0;
  bool multistart_agreement = true;
  std::string maximizer_status = "proven";
  HypothesisAudit audit;

  double value_at(double n) const;
  double log_value_at(double n) const;
};

// Assembles the estimate for sums over (L + l_n) ∩ nK:
//   C = b.constant * (2 pi)^(r/2 + b.power) * psi(x0) / (Vol(L) det(-H|_V)^(1/2)),
//   p = r/2 + b.power, rate = phi(x0).
AsymptoticEstimate asymptotic_estimate(const LaplaceProblem& problem,
                                       const MaximizeResult& opt);

// Integer linear system C l = n * rhs_unit over the box 0 <= l_i <= n.
struct CosetSystem {
  std::vector<std::vector<long>> rows;
  std::vector<long> rhs_unit;
  int dim() const { return rows.empty() ? 0 : static_cast<int>(rows[0].size()); }
};

// Exact sum of term(l) over all integer points of the system inside the
// box, enumerated by backtracking in coordinate order with per-constraint
// residual interval pruning. Throws budget_error when the node count
// exceeds the cap.
Rat exact_coset_sum(const CosetSystem& system, long n,
                    const std::function<Rat(const std::vector<long>&)>& term,
                    std::uint64_t node_cap = 10'000'000);

// Count of enumerated points (term = 1), same traversal.
Int coset_point_count(const CosetSystem& system, long n, std::uint64_t node_cap = 10'000'000);

}  // namespace liftpm
