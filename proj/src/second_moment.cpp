#include "liftpm/second_moment.hpp"

#include <cmath>
#include <numbers>

#include "liftpm/errors.hpp"

namespace liftpm {

namespace {

std::vector<Int> factorial_table(long n) {
  std::vector<Int> fact(n + 1);
  fact[0] = 1;
  for (long k = 1; k <= n; ++k) fact[k] = fact[k - 1] * k;
  return fact;
}

long block_value(const Multigraph& G, const PairIndex& P, const std::vector<long>& ell,
                 int i, int a, int b) {
  (void)G;
  return ell[P.index_by_slot(i, a, b)];
}

Rat a2_value(const Multigraph& G, const PairIndex& P, const std::vector<Int>& fact, long n,
             const std::vector<long>& ell) {
  Int num = 1, den = 1;
  for (int e = 0; e < G.edge_count(); ++e) {
    const EdgeStu f = edge_stu(G, P, ell, e);
    num *= fact[f.s] * fact[f.t] * fact[f.u];
    den *= fact[f.diag];
  }
  for (int i = 0; i < G.vertex_count(); ++i) {
    const int d = P.block_degree(i);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        if (a != b) den *= fact[block_value(G, P, ell, i, a, b)];
  }
  const int excess = G.edge_count() - G.vertex_count();
  for (int k = 0; k < excess; ++k) den *= fact[n];
  for (int k = 0; k < -excess; ++k) num *= fact[n];
  return make_rat(num, den);
}

}  // namespace

EdgeStu edge_stu(const Multigraph& G, const PairIndex& P, const std::vector<long>& ell, int e) {
  const int i = G.edge(e).u;
  const int d = P.block_degree(i);
  const int se = P.slot_of_edge(i, e);
  EdgeStu out;
  out.diag = ell[P.index_by_slot(i, se, se)];
  for (int b = 0; b < d; ++b) {
    if (b == se) continue;
    out.s += ell[P.index_by_slot(i, se, b)];
    out.t += ell[P.index_by_slot(i, b, se)];
    for (int c = 0; c < d; ++c)
      if (c != se) out.u += ell[P.index_by_slot(i, b, c)];
  }
  return out;
}

Rat term_a2(const Multigraph& G, const PairIndex& P, long n, const std::vector<long>& ell) {
  if (static_cast<int>(ell.size()) != P.dim())
    throw validation_error("pair-count vector length mismatch");
  for (long v : ell)
    if (v < 0 || v > n) throw validation_error("pair count outside [0, n]");
  for (int i = 0; i < G.vertex_count(); ++i) {
    long sum = 0;
    const int d = P.block_degree(i);
    for (int k = 0; k < d * d; ++k) sum += ell[P.block_offset(i) + k];
    if (sum != n) throw validation_error("pair counts do not sum to n at a vertex");
  }
  for (int e = 0; e < G.edge_count(); ++e) {
    const int i = G.edge(e).u;
    const int j = G.edge(e).v;
    if (ell[P.index(i, e, e)] != ell[P.index(j, e, e)])
      throw validation_error("diagonal compatibility violated at an edge");
    long row_i = 0, row_j = 0, col_i = 0, col_j = 0;
    for (int f : G.incident(i)) {
      row_i += ell[P.index(i, e, f)];
      col_i += ell[P.index(i, f, e)];
    }
    for (int f : G.incident(j)) {
      row_j += ell[P.index(j, e, f)];
      col_j += ell[P.index(j, f, e)];
    }
    if (row_i != row_j || col_i != col_j)
      throw validation_error("fiber-sum compatibility violated at an edge");
    const EdgeStu f = edge_stu(G, P, ell, e);
    if (f.s + f.t + f.u + f.diag != n)
      throw validation_error("edge split does not account for all n fiber edges");
  }
  return a2_value(G, P, factorial_table(n), n, ell);
}

CosetSystem second_moment_system(const Multigraph& G, const PairIndex& P) {
  CosetSystem sys;
  const int N = P.dim();
  for (int i = 0; i < G.vertex_count(); ++i) {
    std::vector<long> row(N, 0);
    const int d = P.block_degree(i);
    for (int k = 0; k < d * d; ++k) row[P.block_offset(i) + k] = 1;
    sys.rows.push_back(std::move(row));
    sys.rhs_unit.push_back(1);
  }
  for (int e = 0; e < G.edge_count(); ++e) {
    const int i = G.edge(e).u;
    const int j = G.edge(e).v;
    std::vector<long> diag(N, 0), rowsum(N, 0), colsum(N, 0);
    diag[P.index(i, e, e)] += 1;
    diag[P.index(j, e, e)] -= 1;
    for (int f : G.incident(i)) {
      rowsum[P.index(i, e, f)] += 1;
      colsum[P.index(i, f, e)] += 1;
    }
    for (int f : G.incident(j)) {
      rowsum[P.index(j, e, f)] -= 1;
      colsum[P.index(j, f, e)] -= 1;
    }
    sys.rows.push_back(std::move(diag));
    sys.rows.push_back(std::move(rowsum));
    sys.rows.push_back(std::move(colsum));
    sys.rhs_unit.push_back(0);
    sys.rhs_unit.push_back(0);
    sys.rhs_unit.push_back(0);
  }
  return sys;
}

Rat exact_second_moment(const Multigraph& G, long n, std::uint64_t node_cap) {
  const PairIndex P(G);
  const auto fact = factorial_table(n);
  const auto sys = second_moment_system(G, P);
  return exact_coset_sum(
      sys, n, [&](const std::vector<long>& ell) { return a2_value(G, P, fact, n, ell); },
      node_cap);
}

SectionObjective second_moment_objective(const Multigraph& G, const PairIndex& P) {
  const int g = G.vertex_count();
  const int N = P.dim();

  struct BlockView {
    int off = 0;
    int d = 0;
  };
  std::vector<BlockView> blocks(g);
  for (int i = 0; i < g; ++i) blocks[i] = {P.block_offset(i), P.block_degree(i)};

  // sigma/tau/gamma per (vertex, slot)
  const auto stg = [blocks](const Eigen::VectorXd& x, int i, std::vector<double>& sigma,
                            std::vector<double>& tau, std::vector<double>& gamma) {
    const auto [off, d] = blocks[i];
    sigma.assign(d, 0.0);
    tau.assign(d, 0.0);
    gamma.assign(d, 0.0);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        const double v = x[off + a * d + b];
        if (b != a) sigma[a] += v;
        if (a != b) tau[b] += v;
        for (int e = 0; e < d; ++e)
          if (a != e && b != e) gamma[e] += v;
      }
  };

  SectionObjective f;
  f.phi = [blocks, g, stg](const Eigen::VectorXd& x) {
    double total = 0;
    std::vector<double> sigma, tau, gamma;
    for (int i = 0; i < g; ++i) {
      const auto [off, d] = blocks[i];
      stg(x, i, sigma, tau, gamma);
      double s = 0;
      for (int a = 0; a < d; ++a) {
        s += sigma[a] * std::log(sigma[a]) + tau[a] * std::log(tau[a]) +
             gamma[a] * std::log(gamma[a]);
        const double diag = x[off + a * d + a];
        s -= diag * std::log(diag);
        for (int b = 0; b < d; ++b)
          if (b != a) {
            const double v = x[off + a * d + b];
            s -= 2.0 * v * std::log(v);
          }
      }
      total += 0.5 * s;
    }
    return total;
  };
  f.grad = [blocks, g, N, stg](const Eigen::VectorXd& x) {
    Eigen::VectorXd grad(N);
    std::vector<double> sigma, tau, gamma;
    for (int i = 0; i < g; ++i) {
      const auto [off, d] = blocks[i];
      stg(x, i, sigma, tau, gamma);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          double v;
          if (a == b) {
            v = -std::log(x[off + a * d + a]) - 1.0;
            for (int e = 0; e < d; ++e)
              if (e != a) v += std::log(gamma[e]) + 1.0;
          } else {
            v = std::log(sigma[a]) + std::log(tau[b]) - 2.0 * std::log(x[off + a * d + b]);
            for (int e = 0; e < d; ++e)
              if (e != a && e != b) v += std::log(gamma[e]) + 1.0;
          }
          grad[off + a * d + b] = 0.5 * v;
        }
    }
    return grad;
  };
  f.hess = [blocks, g, N, stg](const Eigen::VectorXd& x) {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N, N);
    std::vector<double> sigma, tau, gamma;
    for (int i = 0; i < g; ++i) {
      const auto [off, d] = blocks[i];
      stg(x, i, sigma, tau, gamma);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          const int row = off + a * d + b;
          for (int c = 0; c < d; ++c)
            for (int e = 0; e < d; ++e) {
              const int col = off + c * d + e;
              double v = 0;
              if (a == b) {
                for (int q = 0; q < d; ++q)
                  if (q != a && q != c && q != e) v += 1.0 / gamma[q];
                if (c == a && e == a) v -= 1.0 / x[row];
              } else {
                if (c == a && e != a) v += 1.0 / sigma[a];
                if (e == b && c != b) v += 1.0 / tau[b];
                for (int q = 0; q < d; ++q)
                  if (q != a && q != b && q != c && q != e) v += 1.0 / gamma[q];
                if (c == a && e == b) v -= 2.0 / x[row];
              }
              H(row, col) = 0.5 * v;
            }
        }
    }
    return H;
  };
  f.psi = [blocks, g, stg](const Eigen::VectorXd& x) {
    double p = 1;
    std::vector<double> sigma, tau, gamma;
    for (int i = 0; i < g; ++i) {
      const auto [off, d] = blocks[i];
      stg(x, i, sigma, tau, gamma);
      for (int a = 0; a < d; ++a) {
        p *= std::pow(sigma[a] * tau[a] * gamma[a] / x[off + a * d + a], 0.25);
        for (int b = 0; b < d; ++b)
          if (b != a) p /= std::sqrt(x[off + a * d + b]);
      }
    }
    return p;
  };
  return f;
}

LaplaceProblem second_moment_problem(const Multigraph& G, const GraphMatrices& M,
                                     const LatticeReport& L2) {
  (void)M;
  const PairIndex P(G);
  LaplaceProblem p;
  p.ambient_dim = P.dim();
  p.lattice = L2.lattice;
  p.f = second_moment_objective(G, P);
  const long g = G.vertex_count();
  const long h = G.edge_count();
  p.b_n.constant = 1.0;
  p.b_n.power = make_rat(g + 3 * h - P.dim(), 2);
  const auto d = G.regular_degree();
  if (d) {
    Eigen::VectorXd start(P.dim());
    start.setConstant(1.0 / double(*d * *d));
    p.start = start;
  }
  return p;
}

Phi2MaximizerReport verify_phi2_maximizer(const Multigraph& G, const GraphMatrices& M) {
  const auto d_opt = G.regular_degree();
  if (!d_opt || *d_opt < 3)
    throw validation_error("pair-objective maximizer requires d-regular G, d >= 3");
  const long d = *d_opt;
  const long g = G.vertex_count();

  const auto L2 = second_moment_lattice(G, M);
  const auto problem = second_moment_problem(G, M, L2);
  Phi2MaximizerReport rep;
  rep.opt = maximize_on_section(problem);
  const double uniform = 1.0 / double(d * d);
  double dev = 0;
  for (int k = 0; k < rep.opt.x0.size(); ++k)
    dev = std::max(dev, std::abs(rep.opt.x0[k] - uniform));
  rep.deviation_from_uniform = dev;
  rep.phi_expected =
      g * ((d - 1) * std::log(double(d - 1)) - (d - 2) * std::log(double(d)));
  if (d == 3) {
    if (dev > 1e-9)
      throw consistency_error("3-regular pair objective maximum is not the uniform point");
    if (std::abs(rep.opt.phi0 - rep.phi_expected) > 1e-10)
      throw consistency_error("3-regular pair objective value disagrees with g ln(4/3)");
    rep.status = "proven";
  } else {
    rep.status = rep.opt.multistart_agreement ? "heuristic-unique" : "unresolved";
  }
  return rep;
}

SecondMomentAsymptotics asymptotic_second_moment(const Multigraph& G, const GraphMatrices& M) {
  const auto d_opt = G.regular_degree();
  if (!d_opt || *d_opt < 3)
    throw validation_error("asymptotic second moment requires d-regular G, d >= 3");
  const long d = *d_opt;
  const long g = G.vertex_count();

  const auto L2 = second_moment_lattice(G, M);
  const auto problem = second_moment_problem(G, M, L2);
  const PairIndex P(G);

  SecondMomentAsymptotics out;
  const auto maximizer = verify_phi2_maximizer(G, M);
  out.maximizer_status = maximizer.status;

  // Assembly at the exact uniform maximizer.
  const int r = L2.lattice.rank();
  Eigen::VectorXd x0(P.dim());
  x0.setConstant(1.0 / double(d * d));
  const double detH = hessian_restricted_det(problem.f.hess(x0), L2.lattice.basis);
  if (detH <= 0) throw validation_error("restricted Hessian determinant is not positive");
  const double log_psi0 = double(d * g) * std::log(double((d - 1)) * std::pow(double(d), d - 2));
  const double log_vol = 0.5 * std::log(L2.lattice.vol_squared.get_d());
  const Rat p_total = make_rat(r, 2) + problem.b_n.power;
  const double log_c = p_total.get_d() * std::log(2.0 * std::numbers::pi) + log_psi0 -
                       log_vol - 0.5 * std::log(detH);
  out.analytic.constant = std::exp(log_c);
  out.analytic.poly_power = p_total;
  out.analytic.exp_rate =
      g * ((d - 1) * std::log(double(d - 1)) - (d - 2) * std::log(double(d)));
  out.analytic.det_neg_hess_restricted = detH;
  out.analytic.vol_squared = L2.lattice.vol_squared;
  out.analytic.x0.assign(x0.data(), x0.data() + x0.size());
  out.analytic.multistart_agreement = maximizer.opt.multistart_agreement;
  out.analytic.maximizer_status = out.maximizer_status;

  // Independent numeric assembly from the located maximum.
  out.engine = asymptotic_estimate(problem, maximizer.opt);
  out.engine.maximizer_status = out.maximizer_status;
  out.analytic.audit = out.engine.audit;
  out.rel_gap = std::abs(out.engine.constant / out.analytic.constant - 1.0);
  if (out.rel_gap > 1e-6 || out.engine.poly_power != out.analytic.poly_power)
    throw consistency_error("second-moment analytic and engine assemblies disagree");
  return out;
}

}  // namespace liftpm
