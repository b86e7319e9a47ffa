#include <doctest.h>

#include <cmath>
#include <numbers>

#include "liftpm/errors.hpp"
#include "liftpm/first_moment.hpp"
#include "liftpm/laplace.hpp"
#include "liftpm/lattice.hpp"
#include "liftpm/matrices.hpp"
#include "liftpm/multigraph.hpp"
#include "liftpm/rng.hpp"
#include "liftpm/second_moment.hpp"

using namespace liftpm;

namespace {

// central finite differences for gradient/Hessian validation
void check_derivatives(const SectionObjective& f, const Eigen::VectorXd& x, double tol) {
  const double step = 1e-5;
  const Eigen::VectorXd g = f.grad(x);
  const Eigen::MatrixXd H = f.hess(x);
  for (int i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    const double fd = (f.phi(xp) - f.phi(xm)) / (2 * step);
    CHECK(std::abs(fd - g[i]) <= tol * std::max(1.0, std::abs(g[i])));
    const Eigen::VectorXd gp = f.grad(xp), gm = f.grad(xm);
    for (int j = 0; j < x.size(); ++j) {
      const double hd = (gp[j] - gm[j]) / (2 * step);
      CHECK(std::abs(hd - H(j, i)) <= tol * std::max(1.0, std::abs(H(j, i))));
    }
  }
}

Eigen::VectorXd random_interior_on_section(const Lattice& L, const Eigen::VectorXd& base,
                                           KeyedStream& rng) {
  Eigen::VectorXd x = base;
  for (int tries = 0; tries < 50; ++tries) {
    Eigen::VectorXd cand = base;
    for (const auto& b : L.basis) {
      const double c = rng.next_in(-0.05, 0.05);
      for (int j = 0; j < cand.size(); ++j) cand[j] += c * b[j].get_d();
    }
    bool ok = true;
    for (int j = 0; j < cand.size(); ++j)
      if (cand[j] < 0.02 || cand[j] > 0.98) ok = false;
    if (ok) {
      x = cand;
      break;
    }
  }
  return x;
}

}  // namespace

TEST_CASE("quadratic bowl maximization on a section") {
  // phi(x) = -sum (x_i - w_i)^2 restricted to a section through w
  const int N = 4;
  Eigen::VectorXd w(N);
  w << 0.3, 0.4, 0.5, 0.6;
  LaplaceProblem p;
  p.ambient_dim = N;
  IntMat constraints(2, N);
  for (int k = 0; k < N; ++k) {
    constraints.at(0, k) = 1;
    constraints.at(1, k) = (k % 2 == 0) ? 1 : -1;
  }
  p.lattice = integer_kernel_basis(constraints);
  REQUIRE(p.lattice.rank() == 2);
  p.start = w;
  p.f.phi = [w](const Eigen::VectorXd& x) { return -(x - w).squaredNorm(); };
  p.f.grad = [w](const Eigen::VectorXd& x) { return Eigen::VectorXd(-2 * (x - w)); };
  p.f.hess = [N](const Eigen::VectorXd&) {
    return Eigen::MatrixXd(-2 * Eigen::MatrixXd::Identity(N, N));
  };
  p.f.psi = [](const Eigen::VectorXd&) { return 1.0; };

  const auto res = maximize_on_section(p, 20);
  CHECK(res.grad_residual < 1e-12);
  CHECK((res.x0 - w).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK(std::abs(res.phi0) < 1e-20);
  CHECK(res.multistart_agreement);
}

TEST_CASE("first-moment maximum is uniform for regular graphs") {
  for (const auto& G : {make_complete_graph(4), make_parallel_edges(3), make_petersen(),
                        make_complete_graph(5), make_complete_graph(6)}) {
    const auto M = build_matrices(G);
    const auto L1 = first_moment_lattice(G, M);
    const auto p = first_moment_problem(G, M, L1);
    const auto res = maximize_on_section(p, 25);
    const double d = G.degree(0);
    for (int j = 0; j < res.x0.size(); ++j)
      CHECK(std::abs(res.x0[j] - 1.0 / d) < 1e-9);
    const double g = G.vertex_count();
    const double expected_phi =
        0.5 * g * ((d - 1) * std::log(d - 1.0) - (d - 2) * std::log(d));
    CHECK(res.phi0 == doctest::Approx(expected_phi).epsilon(1e-10));
    CHECK(p.f.psi(res.x0) ==
          doctest::Approx(std::pow(d - 1.0, G.edge_count() / 2.0)).epsilon(1e-9));
    CHECK(res.multistart_agreement);
  }
}

TEST_CASE("analytic derivatives match finite differences") {
  KeyedStream rng(515);
  const auto k4 = make_complete_graph(4);
  const auto mk4 = build_matrices(k4);
  const auto L1 = first_moment_lattice(k4, mk4);
  const auto f1 = first_moment_objective(k4);
  Eigen::VectorXd base1(6);
  base1.setConstant(1.0 / 3.0);
  for (int t = 0; t < 20; ++t) {
    const auto x = random_interior_on_section(L1.lattice, base1, rng);
    check_derivatives(f1, x, 1e-5);
  }

  const PairIndex P(k4);
  const auto L2 = second_moment_lattice(k4, mk4);
  const auto f2 = second_moment_objective(k4, P);
  Eigen::VectorXd base2(P.dim());
  base2.setConstant(1.0 / 9.0);
  for (int t = 0; t < 20; ++t) {
    const auto x = random_interior_on_section(L2.lattice, base2, rng);
    check_derivatives(f2, x, 1e-5);
  }
}

TEST_CASE("restricted Hessian determinant closed form and basis invariance") {
  const auto k4 = make_complete_graph(4);
  const auto mk4 = build_matrices(k4);
  const auto L1 = first_moment_lattice(k4, mk4);

  // H = -(d(d-2)/(d-1)) I restricted to a rank-2 basis: (3/2)^2 = 9/4
  const Eigen::MatrixXd H = -1.5 * Eigen::MatrixXd::Identity(6, 6);
  const double det = hessian_restricted_det(H, L1.lattice.basis);
  CHECK(det == doctest::Approx(2.25).epsilon(1e-12));

  // invariance under unimodular change of basis
  KeyedStream rng(616);
  const auto f1 = first_moment_objective(k4);
  Eigen::VectorXd x0(6);
  x0.setConstant(1.0 / 3.0);
  const Eigen::MatrixXd Hphi = f1.hess(x0);
  const double reference = hessian_restricted_det(Hphi, L1.lattice.basis);
  for (int t = 0; t < 10; ++t) {
    // a few elementary row operations keep the lattice
    auto basis = L1.lattice.basis;
    for (int op = 0; op < 3; ++op) {
      const int a = static_cast<int>(rng.below(basis.size()));
      int b = static_cast<int>(rng.below(basis.size()));
      if (a == b) b = (b + 1) % basis.size();
      const long c = 1 + static_cast<long>(rng.below(2));
      for (std::size_t j = 0; j < basis[a].size(); ++j) basis[a][j] += c * basis[b][j];
    }
    const double det_t = hessian_restricted_det(Hphi, basis);
    CHECK(det_t == doctest::Approx(reference).epsilon(1e-10));
  }

  CHECK_THROWS_AS(hessian_restricted_det(H, {{Int(1), Int(1), Int(0), Int(0), Int(0), Int(0)},
                                             {Int(2), Int(2), Int(0), Int(0), Int(0), Int(0)}}),
                  validation_error);
}

TEST_CASE("coset sums on the first-moment system of K4") {
  const auto k4 = make_complete_graph(4);
  const auto mk4 = build_matrices(k4);
  const auto sys = first_moment_system(k4, mk4);

  // n=1: integer points are exactly the three perfect matchings of K4
  CHECK(coset_point_count(sys, 1) == 3);
  // brute-force confirmation over all 0/1 vectors
  {
    int brute = 0;
    for (int bits = 0; bits < 64; ++bits) {
      bool ok = true;
      for (int v = 0; v < 4 && ok; ++v) {
        int sum = 0;
        for (int e : k4.incident(v)) sum += (bits >> e) & 1;
        ok = sum == 1;
      }
      if (ok) ++brute;
    }
    CHECK(brute == 3);
  }
  // n=0: only the zero vector
  CHECK(coset_point_count(sys, 0) == 1);

  // budget error carries the node count
  CHECK_THROWS_AS(coset_point_count(sys, 12, 10), budget_error);
}

TEST_CASE("degenerate rank-0 estimate is psi times b_n") {
  LaplaceProblem p;
  p.ambient_dim = 2;
  p.lattice.ambient_dim = 2;  // empty basis: rank 0
  Eigen::VectorXd w(2);
  w << 0.25, 0.75;
  p.start = w;
  p.f.phi = [w](const Eigen::VectorXd& x) { return -(x - w).squaredNorm(); };
  p.f.grad = [w](const Eigen::VectorXd& x) { return Eigen::VectorXd(-2 * (x - w)); };
  p.f.hess = [](const Eigen::VectorXd&) {
    return Eigen::MatrixXd(-2 * Eigen::MatrixXd::Identity(2, 2));
  };
  p.f.psi = [](const Eigen::VectorXd&) { return 7.5; };
  p.b_n.constant = 2.0;
  p.b_n.power = Rat(0);
  const auto opt = maximize_on_section(p);
  const auto est = asymptotic_estimate(p, opt);
  CHECK(est.constant == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(est.poly_power == Rat(0));
  CHECK(est.exp_rate == doctest::Approx(0.0));
}

TEST_CASE("asymptotic convergence of the K4 first moment") {
  const auto k4 = make_complete_graph(4);
  const auto mk4 = build_matrices(k4);
  const auto asym = asymptotic_first_moment(k4, mk4);
  double prev_gap = -1;
  for (long n : {12L, 24L, 48L, 96L}) {
    const Rat exact = exact_first_moment(k4, mk4, n);
    const double ratio = exact.get_d() / asym.closed_form.value_at(double(n));
    const double gap = std::abs(ratio - 1.0);
    if (prev_gap >= 0) CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 0.01);
}

TEST_CASE("hypothesis audit flags boundary maxima") {
  // phi increasing toward the boundary has no interior stationary point;
  // Newton must fail rather than fabricate an estimate
  LaplaceProblem p;
  p.ambient_dim = 2;
  IntMat ones(1, 2);
  ones.at(0, 0) = 1;
  ones.at(0, 1) = -1;
  p.lattice = integer_kernel_basis(ones);  // span of (1,1)
  Eigen::VectorXd start(2);
  start << 0.5, 0.5;
  p.start = start;
  p.f.phi = [](const Eigen::VectorXd& x) { return x[0] + x[1]; };
  p.f.grad = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(Eigen::VectorXd::Ones(x.size()));
  };
  p.f.hess = [](const Eigen::VectorXd& x) {
    return Eigen::MatrixXd(Eigen::MatrixXd::Zero(x.size(), x.size()));
  };
  p.f.psi = [](const Eigen::VectorXd&) { return 1.0; };
  CHECK_THROWS_AS(maximize_on_section(p, 0), validation_error);
}
