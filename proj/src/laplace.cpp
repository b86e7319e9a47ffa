#include "liftpm/laplace.hpp"

#include <cmath>
#include <numbers>

#include "liftpm/errors.hpp"
#include "liftpm/rng.hpp"

namespace liftpm {

namespace {

constexpr double kBoxMargin = 1e-12;
constexpr double kGradTol = 1e-12;

Eigen::MatrixXd section_frame(const Lattice& L) {
  const int N = L.ambient_dim;
  const int r = L.rank();
  Eigen::MatrixXd B(N, r);
  for (int j = 0; j < r; ++j)
    for (int i = 0; i < N; ++i) B(i, j) = L.basis[j][i].get_d();
  if (r == 0) return B;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(N, r);
  return Q;
}

bool strictly_inside_box(const Eigen::VectorXd& x, double margin) {
  for (int i = 0; i < x.size(); ++i)
    if (!(x[i] > margin && x[i] < 1.0 - margin)) return false;
  return true;
}

// Largest t >= 0 with x + t*dir still inside the box margins.
double max_feasible_step(const Eigen::VectorXd& x, const Eigen::VectorXd& dir, double margin) {
  double t = std::numeric_limits<double>::infinity();
  for (int i = 0; i < x.size(); ++i) {
    if (dir[i] > 0) t = std::min(t, (1.0 - margin - x[i]) / dir[i]);
    if (dir[i] < 0) t = std::min(t, (margin - x[i]) / dir[i]);
  }
  return std::max(t, 0.0);
}

Eigen::VectorXd newton_from(const LaplaceProblem& p, const Eigen::MatrixXd& Z,
                            Eigen::VectorXd x, int* iters_out, double* residual_out) {
  const int max_iter = 200;
  double residual = 0.0;
  int it = 0;
  for (; it < max_iter; ++it) {
    const Eigen::VectorXd g = Z.transpose() * p.f.grad(x);
    residual = g.norm();
    if (residual < kGradTol) break;
    const Eigen::MatrixXd B = -(Z.transpose() * p.f.hess(x) * Z);
    Eigen::VectorXd dy = B.ldlt().solve(g);
    if (!dy.allFinite()) throw validation_error("Newton step failed: singular section Hessian");
    Eigen::VectorXd dir = Z * dy;
    const double tmax = max_feasible_step(x, dir, kBoxMargin);
    double t = std::min(1.0, 0.99 * tmax);
    if (t <= 0) throw validation_error("Newton step blocked at the box boundary");
    const double phi_x = p.f.phi(x);
    const double slope = g.dot(dy);
    // once the predicted gain falls below evaluation noise, plain feasible
    // Newton steps are safe and the sufficient-decrease test is meaningless
    const double noise = 1e-13 * (1.0 + std::abs(phi_x));
    int backtracks = 0;
    while (backtracks < 60) {
      const Eigen::VectorXd cand = x + t * dir;
      if (strictly_inside_box(cand, kBoxMargin) &&
          (t * slope < noise || p.f.phi(cand) >= phi_x + 1e-4 * t * slope))
        break;
      t *= 0.5;
      ++backtracks;
    }
    if (backtracks >= 60)
      throw validation_error("line search failed; residual " + std::to_string(residual));
    x += t * dir;
  }
  if (it == max_iter)
    throw validation_error("Newton did not converge; projected gradient norm " +
                           std::to_string(residual));
  if (iters_out) *iters_out = it;
  if (residual_out) *residual_out = residual;
  return x;
}

// Interior feasible point via the analytic center of K ∩ W.
Eigen::VectorXd analytic_center(const LaplaceProblem& p, const Eigen::MatrixXd& Z,
                                const Eigen::VectorXd& anchor) {
  LaplaceProblem barrier = p;
  barrier.f.phi = [](const Eigen::VectorXd& x) {
    double s = 0;
    for (int i = 0; i < x.size(); ++i) s += std::log(x[i]) + std::log(1.0 - x[i]);
    return s;
  };
  barrier.f.grad = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(x.size());
    for (int i = 0; i < x.size(); ++i) g[i] = 1.0 / x[i] - 1.0 / (1.0 - x[i]);
    return g;
  };
  barrier.f.hess = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(x.size(), x.size());
    for (int i = 0; i < x.size(); ++i)
      H(i, i) = -1.0 / (x[i] * x[i]) - 1.0 / ((1.0 - x[i]) * (1.0 - x[i]));
    return H;
  };
  return newton_from(barrier, Z, anchor, nullptr, nullptr);
}

}  // namespace

MaximizeResult maximize_on_section(const LaplaceProblem& problem, int multistarts,
                                   std::uint64_t seed) {
  const int N = problem.ambient_dim;
  const Eigen::MatrixXd Z = section_frame(problem.lattice);
  Eigen::VectorXd start = problem.start;
  if (start.size() == 0)
    throw validation_error("maximize_on_section needs a feasible start point");
  if (static_cast<int>(start.size()) != N)
    throw validation_error("start point dimension mismatch");
  if (!strictly_inside_box(start, kBoxMargin))
    throw validation_error("no strictly interior feasible start point");

  MaximizeResult res;
  if (problem.lattice.rank() == 0) {
    res.x0 = start;
    res.phi0 = problem.f.phi(start);
    res.grad_residual = 0.0;
    res.multistart_runs = 0;
    return res;
  }

  res.x0 = newton_from(problem, Z, start, &res.iterations, &res.grad_residual);
  res.phi0 = problem.f.phi(res.x0);

  // Multistart uniqueness heuristic: random interior points of K ∩ W.
  KeyedStream rng(seed, 0x6d61784cULL);
  const int r = problem.lattice.rank();
  double spread = 0.0;
  int runs = 0;
  const Eigen::VectorXd center = analytic_center(problem, Z, start);
  for (int s = 0; s < multistarts; ++s) {
    Eigen::VectorXd u(r);
    for (int k = 0; k < r; ++k) u[k] = rng.next_in(-1.0, 1.0);
    const Eigen::VectorXd dir = Z * u;
    const double tmax = max_feasible_step(center, dir, 1e-6);
    const Eigen::VectorXd x_init = center + rng.next_in(0.05, 0.95) * tmax * dir;
    if (!strictly_inside_box(x_init, kBoxMargin)) continue;
    const Eigen::VectorXd xs = newton_from(problem, Z, x_init, nullptr, nullptr);
    spread = std::max(spread, (xs - res.x0).lpNorm<Eigen::Infinity>());
    ++runs;
  }
  res.multistart_runs = runs;
  res.multistart_spread = spread;
  res.multistart_agreement = spread < 1e-8;
  return res;
}

double hessian_restricted_det(const Eigen::MatrixXd& H,
                              const std::vector<std::vector<Int>>& basis) {
  const int r = static_cast<int>(basis.size());
  if (r == 0) return 1.0;
  const int N = static_cast<int>(H.rows());
  Eigen::MatrixXd Zb(N, r);
  for (int j = 0; j < r; ++j) {
    if (static_cast<int>(basis[j].size()) != N)
      throw validation_error("basis vector dimension mismatch");
    for (int i = 0; i < N; ++i) Zb(i, j) = basis[j][i].get_d();
  }
  const Eigen::MatrixXd neg = -(Zb.transpose() * H * Zb);
  const Eigen::MatrixXd gram = Zb.transpose() * Zb;
  const double dg = gram.fullPivLu().determinant();
  if (std::abs(dg) < 1e-300) throw validation_error("singular Gram matrix in restricted det");
  return neg.fullPivLu().determinant() / dg;
}

double AsymptoticEstimate::log_value_at(double n) const {
  return std::log(constant) + poly_power.get_d() * std::log(n) + n * exp_rate;
}

double AsymptoticEstimate::value_at(double n) const { return std::exp(log_value_at(n)); }

AsymptoticEstimate asymptotic_estimate(const LaplaceProblem& problem,
                                       const MaximizeResult& opt) {
  AsymptoticEstimate est;
  const int r = problem.lattice.rank();
  est.vol_squared = problem.lattice.vol_squared;
  est.det_neg_hess_restricted =
      r == 0 ? 1.0 : hessian_restricted_det(problem.f.hess(opt.x0), problem.lattice.basis);
  est.exp_rate = opt.phi0;
  est.multistart_agreement = opt.multistart_agreement;
  est.x0.assign(opt.x0.data(), opt.x0.data() + opt.x0.size());

  const double psi0 = problem.f.psi(opt.x0);
  est.audit.interior = strictly_inside_box(opt.x0, kBoxMargin);
  est.audit.psi_positive = psi0 > 0;
  est.audit.hessian_negative_definite = est.det_neg_hess_restricted > 0;
  if (!est.audit.interior) est.audit.failure = "maximum point not interior";
  else if (!est.audit.psi_positive) est.audit.failure = "psi(x0) <= 0";
  else if (!est.audit.hessian_negative_definite)
    est.audit.failure = "det(-H|_V) <= 0";
  if (!est.audit.ok())
    throw validation_error("summation hypothesis violated: " + est.audit.failure);

  est.poly_power = make_rat(r, 2) + problem.b_n.power;
  const double two_pi_pow = est.poly_power.get_d();
  const double vol = std::sqrt(problem.lattice.vol_squared.get_d());
  est.constant = problem.b_n.constant * std::pow(2.0 * std::numbers::pi, two_pi_pow) * psi0 /
                 (vol * std::sqrt(est.det_neg_hess_restricted));
  return est;
}

namespace {

struct Enumerator {
  const CosetSystem& sys;
  long n;
  std::uint64_t cap;
  std::uint64_t nodes = 0;
  int nvars;
  int ncons;
  std::vector<long> residual;                 // per constraint
  std::vector<std::vector<long>> suffix_min;  // [var][constraint]
  std::vector<std::vector<long>> suffix_max;
  std::vector<long> point;
  Rat sum = 0;
  const std::function<Rat(const std::vector<long>&)>* term;

  Enumerator(const CosetSystem& s, long n_, std::uint64_t cap_)
      : sys(s), n(n_), cap(cap_) {
    nvars = s.dim();
    ncons = static_cast<int>(s.rows.size());
    residual.resize(ncons);
    for (int c = 0; c < ncons; ++c) residual[c] = n * s.rhs_unit[c];
    suffix_min.assign(nvars + 1, std::vector<long>(ncons, 0));
    suffix_max.assign(nvars + 1, std::vector<long>(ncons, 0));
    for (int v = nvars - 1; v >= 0; --v) {
      for (int c = 0; c < ncons; ++c) {
        const long coeff = s.rows[c][v];
        suffix_min[v][c] = suffix_min[v + 1][c] + std::min(0L, coeff * n);
        suffix_max[v][c] = suffix_max[v + 1][c] + std::max(0L, coeff * n);
      }
    }
    point.assign(nvars, 0);
  }

  void run(int v) {
    if (++nodes > cap)
      throw budget_error("coset enumeration budget exceeded after " +
                         std::to_string(nodes) + " nodes (cap " + std::to_string(cap) + ")");
    if (v == nvars) {
      for (int c = 0; c < ncons; ++c)
        if (residual[c] != 0) return;
      sum += (*term)(point);
      return;
    }
    // Intersect the feasible interval for point[v] across all constraints.
    long lo = 0, hi = n;
    for (int c = 0; c < ncons; ++c) {
      const long coeff = sys.rows[c][v];
      const long rmin = suffix_min[v + 1][c];
      const long rmax = suffix_max[v + 1][c];
      if (coeff == 0) {
        if (residual[c] < rmin || residual[c] > rmax) return;
        continue;
      }
      // need rmin <= residual - coeff*value <= rmax
      const long a = residual[c] - rmax;
      const long b = residual[c] - rmin;
      long vlo, vhi;
      if (coeff > 0) {
        vlo = a >= 0 ? (a + coeff - 1) / coeff : -((-a) / coeff);
        vhi = b >= 0 ? b / coeff : -((-b + coeff - 1) / coeff);
      } else {
        const long q = -coeff;
        vlo = (-b) >= 0 ? ((-b) + q - 1) / q : -((b) / q);
        vhi = (-a) >= 0 ? (-a) / q : -(((a) + q - 1) / q);
      }
      lo = std::max(lo, vlo);
      hi = std::min(hi, vhi);
      if (lo > hi) return;
    }
    for (long val = lo; val <= hi; ++val) {
      point[v] = val;
      for (int c = 0; c < ncons; ++c) residual[c] -= sys.rows[c][v] * val;
      run(v + 1);
      for (int c = 0; c < ncons; ++c) residual[c] += sys.rows[c][v] * val;
    }
    point[v] = 0;
  }
};

}  // namespace

Rat exact_coset_sum(const CosetSystem& system, long n,
                    const std::function<Rat(const std::vector<long>&)>& term,
                    std::uint64_t node_cap) {
  if (n < 0) throw validation_error("coset sum needs n >= 0");
  for (const auto& row : system.rows)
    if (static_cast<int>(row.size()) != system.dim())
      throw validation_error("ragged constraint rows");
  Enumerator e(system, n, node_cap);
  e.term = &term;
  e.run(0);
  return e.sum;
}

Int coset_point_count(const CosetSystem& system, long n, std::uint64_t node_cap) {
  const std::function<Rat(const std::vector<long>&)> one =
      [](const std::vector<long>&) { return Rat(1); };
  const Rat total = exact_coset_sum(system, n, one, node_cap);
  return total.get_num();
}

}  // namespace liftpm
