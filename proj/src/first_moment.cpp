#include "liftpm/first_moment.hpp"

#include <cmath>
#include <numbers>

#include "liftpm/errors.hpp"

namespace liftpm {

namespace {

// Phase-1 simplex over exact rationals: minimize the artificial sum for
// Ahat z + s = 1, z >= 0. Bland's rule, so it terminates.
std::optional<std::vector<Rat>> feasible_point(const Multigraph& G) {
  const int g = G.vertex_count();
  const int h = G.edge_count();
  const int cols = h + g;
  std::vector<std::vector<Rat>> T(g, std::vector<Rat>(cols + 1, Rat(0)));
  for (int e = 0; e < h; ++e) {
    T[G.edge(e).u][e] = 1;
    T[G.edge(e).v][e] = 1;
  }
  std::vector<int> basis(g);
  for (int i = 0; i < g; ++i) {
    T[i][h + i] = 1;
    T[i][cols] = 1;
    basis[i] = h + i;
  }
  // reduced costs for phase-1 objective (artificials cost 1)
  std::vector<Rat> obj(cols + 1, Rat(0));
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < g; ++i) obj[j] -= T[i][j];
  for (int i = 0; i < g; ++i) obj[cols] -= T[i][cols];
  for (int i = 0; i < g; ++i) obj[h + i] += 1;

  for (;;) {
    int enter = -1;
    for (int j = 0; j < cols; ++j)
      if (obj[j] < 0) {
        enter = j;
        break;
      }
    if (enter < 0) break;
    int leave = -1;
    Rat best;
    for (int i = 0; i < g; ++i) {
      if (T[i][enter] <= 0) continue;
      Rat ratio = T[i][cols] / T[i][enter];
      if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave < 0) return std::nullopt;  // unbounded cannot happen here
    const Rat pivot = T[leave][enter];
    for (int j = 0; j <= cols; ++j) T[leave][j] /= pivot;
    for (int i = 0; i < g; ++i) {
      if (i == leave || T[i][enter] == 0) continue;
      const Rat f = T[i][enter];
      for (int j = 0; j <= cols; ++j) T[i][j] -= f * T[leave][j];
    }
    const Rat f = obj[enter];
    for (int j = 0; j <= cols; ++j) obj[j] -= f * T[leave][j];
    basis[leave] = enter;
  }
  // optimum of the artificial sum is -obj[cols]
  if (obj[cols] != 0) return std::nullopt;
  std::vector<Rat> z(h, Rat(0));
  for (int i = 0; i < g; ++i)
    if (basis[i] < h) z[basis[i]] = T[i][cols];
  return z;
}

std::vector<Int> factorial_table(long n) {
  std::vector<Int> fact(n + 1);
  fact[0] = 1;
  for (long k = 1; k <= n; ++k) fact[k] = fact[k - 1] * k;
  return fact;
}

Rat a1_value(const Multigraph& G, const std::vector<Int>& fact, long n,
             const std::vector<long>& ell) {
  Int num = 1, den = 1;
  for (int e = 0; e < G.edge_count(); ++e) {
    num *= fact[n - ell[e]];
    den *= fact[ell[e]];
  }
  const int excess = G.edge_count() - G.vertex_count();
  for (int k = 0; k < excess; ++k) den *= fact[n];
  for (int k = 0; k < -excess; ++k) num *= fact[n];
  return make_rat(num, den);
}

}  // namespace

std::optional<std::vector<Rat>> fractional_pm(const Multigraph& G) {
  if (const auto d = G.regular_degree()) {
    return std::vector<Rat>(G.edge_count(), make_rat(1, *d));
  }
  return feasible_point(G);
}

Rat term_a1(const Multigraph& G, long n, const std::vector<long>& ell) {
  if (static_cast<int>(ell.size()) != G.edge_count())
    throw validation_error("fiber vector length mismatch");
  for (long v : ell)
    if (v < 0 || v > n) throw validation_error("fiber count outside [0, n]");
  for (int v = 0; v < G.vertex_count(); ++v) {
    long sum = 0;
    for (int e : G.incident(v)) sum += ell[e];
    if (sum != n) throw validation_error("fiber counts do not sum to n at a vertex");
  }
  return a1_value(G, factorial_table(n), n, ell);
}

CosetSystem first_moment_system(const Multigraph& G, const GraphMatrices& M) {
  CosetSystem sys;
  sys.rows = M.incidence;
  sys.rhs_unit.assign(G.vertex_count(), 1);
  return sys;
}

Rat exact_first_moment(const Multigraph& G, const GraphMatrices& M, long n,
                       std::uint64_t node_cap) {
  const auto fact = factorial_table(n);
  const auto sys = first_moment_system(G, M);
  return exact_coset_sum(
      sys, n, [&](const std::vector<long>& ell) { return a1_value(G, fact, n, ell); },
      node_cap);
}

SectionObjective first_moment_objective(const Multigraph& G) {
  const int h = G.edge_count();
  SectionObjective f;
  f.phi = [h](const Eigen::VectorXd& x) {
    double s = 0;
    for (int e = 0; e < h; ++e)
      s += (1.0 - x[e]) * std::log(1.0 - x[e]) - x[e] * std::log(x[e]);
    return s;
  };
  f.grad = [h](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(h);
    for (int e = 0; e < h; ++e) g[e] = -std::log(1.0 - x[e]) - std::log(x[e]) - 2.0;
    return g;
  };
  f.hess = [h](const Eigen::VectorXd& x) {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(h, h);
    for (int e = 0; e < h; ++e) H(e, e) = 1.0 / (1.0 - x[e]) - 1.0 / x[e];
    return H;
  };
  f.psi = [h](const Eigen::VectorXd& x) {
    double p = 1;
    for (int e = 0; e < h; ++e) p *= std::sqrt((1.0 - x[e]) / x[e]);
    return p;
  };
  return f;
}

double psi_at_term(const Multigraph& G, long n, const std::vector<long>& ell) {
  if (static_cast<int>(ell.size()) != G.edge_count() || n < 1)
    throw validation_error("psi_at_term needs a fiber vector and n >= 1");
  double p = 1;
  for (int e = 0; e < G.edge_count(); ++e) {
    double xe = double(ell[e]) / double(n);
    double complement = 1.0 - xe;
    if (xe == 0.0) xe = 1.0 / double(n);
    if (complement == 0.0) complement = 1.0 / double(n);
    p *= std::sqrt(complement / xe);
  }
  return p;
}

LaplaceProblem first_moment_problem(const Multigraph& G, const GraphMatrices& M,
                                    const LatticeReport& L1) {
  (void)M;
  LaplaceProblem p;
  p.ambient_dim = G.edge_count();
  p.lattice = L1.lattice;
  p.f = first_moment_objective(G);
  p.b_n.constant = 1.0;
  p.b_n.power = make_rat(G.vertex_count() - G.edge_count(), 2);
  const auto z = fractional_pm(G);
  if (z) {
    Eigen::VectorXd start(G.edge_count());
    bool interior = true;
    for (int e = 0; e < G.edge_count(); ++e) {
      start[e] = (*z)[e].get_d();
      if (start[e] <= 0.0 || start[e] >= 1.0) interior = false;
    }
    if (interior) p.start = start;
  }
  return p;
}

FirstMomentAsymptotics asymptotic_first_moment(const Multigraph& G, const GraphMatrices& M) {
  const auto d_opt = G.regular_degree();
  if (!d_opt || *d_opt < 3)
    throw validation_error("asymptotic first moment requires d-regular G with d >= 3");
  const long d = *d_opt;
  const long g = G.vertex_count();
  const long h = G.edge_count();
  const bool bipartite = G.is_bipartite();

  FirstMomentAsymptotics out;

  // Closed form. rate = (g/2) ln((d-1)^(d-1) / d^(d-2)).
  const double rate =
      0.5 * g * ((d - 1) * std::log(double(d - 1)) - (d - 2) * std::log(double(d)));
  Factored sym;
  if (!bipartite) {
    IntMat AD(g, g);
    for (long i = 0; i < g; ++i)
      for (long j = 0; j < g; ++j)
        AD.at(i, j) = M.adjacency[i][j] + (i == j ? d : 0);
    const Int det = determinant(AD);
    sym.mul_int_pow(2, Rat(1));
    sym.mul_int_pow(d - 1, make_rat((d - 1) * g, 2));
    sym.mul_int_pow(d * (d - 2), -make_rat(d * g - 2 * g, 4));
    sym.mul_int_pow(det, make_rat(-1, 2));
    out.closed_form.poly_power = Rat(0);
  } else {
    IntMat AD(g - 1, g - 1);
    for (long i = 0; i + 1 < g; ++i)
      for (long j = 0; j + 1 < g; ++j)
        AD.at(i, j) = M.adjacency[i][j] + (i == j ? d : 0);
    const Int det = determinant(AD);
    sym.mul_int_pow(d - 1, make_rat((d - 1) * g + 1, 2));
    sym.mul_int_pow(d * (d - 2), -make_rat(d * g - 2 * g + 2, 4));
    sym.mul_int_pow(det, make_rat(-1, 2));
    sym.mul_int_pow(2, make_rat(1, 2));
    sym.mul_pi_pow(make_rat(1, 2));
    out.closed_form.poly_power = make_rat(1, 2);
  }
  out.symbolic = sym;
  out.closed_form.constant = sym.to_double();
  out.closed_form.exp_rate = rate;
  out.closed_form.maximizer_status = "proven";

  // Engine path.
  const auto L1 = first_moment_lattice(G, M);
  auto problem = first_moment_problem(G, M, L1);
  out.opt = maximize_on_section(problem);
  out.engine = asymptotic_estimate(problem, out.opt);
  out.closed_form.vol_squared = out.engine.vol_squared;
  out.closed_form.x0 = out.engine.x0;
  out.closed_form.det_neg_hess_restricted = out.engine.det_neg_hess_restricted;
  out.closed_form.multistart_agreement = out.engine.multistart_agreement;
  out.closed_form.audit = out.engine.audit;

  out.rel_gap = std::abs(out.engine.constant / out.closed_form.constant - 1.0);
  if (out.rel_gap > 1e-9 || out.engine.poly_power != out.closed_form.poly_power ||
      std::abs(out.engine.exp_rate - rate) > 1e-10)
    throw consistency_error("first-moment closed form and engine assembly disagree");
  return out;
}

}  // namespace liftpm
