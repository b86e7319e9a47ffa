#include <doctest.h>

#include <cmath>

#include "liftpm/errors.hpp"
#include "liftpm/first_moment.hpp"
#include "liftpm/lift_sim.hpp"
#include "liftpm/matrices.hpp"
#include "liftpm/multigraph.hpp"
#include "liftpm/second_moment.hpp"

using namespace liftpm;

TEST_CASE("pair term values") {
  const auto banana = make_parallel_edges(3);
  const PairIndex P(banana);

  // n = 1, both matchings through edge 1
  std::vector<long> ell(P.dim(), 0);
  ell[P.index(0, 1, 1)] = 1;
  ell[P.index(1, 1, 1)] = 1;
  CHECK(term_a2(banana, P, 1, ell) == Rat(1));
  const auto stu = edge_stu(banana, P, ell, 1);
  CHECK(stu.diag == 1);
  CHECK(stu.s + stu.t + stu.u + stu.diag == 1);

  // n = 0, all zero
  CHECK(term_a2(banana, P, 0, std::vector<long>(P.dim(), 0)) == Rat(1));

  // violating the diagonal compatibility is rejected
  std::vector<long> bad(P.dim(), 0);
  bad[P.index(0, 1, 1)] = 1;
  bad[P.index(1, 2, 2)] = 1;
  CHECK_THROWS_AS(term_a2(banana, P, 1, bad), validation_error);
}

TEST_CASE("exact second moments at n = 1") {
  const auto k4 = make_complete_graph(4);
  CHECK(exact_second_moment(k4, 1) == Rat(9));
  const auto banana = make_parallel_edges(3);
  CHECK(exact_second_moment(banana, 1) == Rat(9));
}

TEST_CASE("exact second moment equals the exhaustive lift average") {
  const auto banana = make_parallel_edges(3);
  for (int n = 1; n <= 3; ++n) {
    const auto oracle = exhaustive_lift_oracle(banana, n, 0);
    CHECK(exact_second_moment(banana, n) == oracle.mean_x2);
  }
  const auto k4 = make_complete_graph(4);
  for (int n = 1; n <= 2; ++n) {
    const auto oracle = exhaustive_lift_oracle(k4, n, 0);
    CHECK(exact_second_moment(k4, n) == oracle.mean_x2);
  }
}

TEST_CASE("cauchy-schwarz between the exact moments") {
  const auto banana = make_parallel_edges(3);
  const auto mb = build_matrices(banana);
  for (int n = 1; n <= 3; ++n) {
    const Rat ex = exact_first_moment(banana, mb, n);
    CHECK(exact_second_moment(banana, n) >= ex * ex);
  }
  const auto k4 = make_complete_graph(4);
  const auto mk4 = build_matrices(k4);
  for (int n = 1; n <= 2; ++n) {
    const Rat ex = exact_first_moment(k4, mk4, n);
    CHECK(exact_second_moment(k4, n) >= ex * ex);
  }
}

TEST_CASE("pair objective maximizer for 3-regular graphs") {
  for (const auto& G : {make_complete_graph(4), make_parallel_edges(3), make_prism3()}) {
    const auto M = build_matrices(G);
    const auto rep = verify_phi2_maximizer(G, M);
    CHECK(rep.status == "proven");
    CHECK(rep.deviation_from_uniform < 1e-9);
    CHECK(rep.opt.multistart_agreement);
    CHECK(rep.opt.phi0 ==
          doctest::Approx(G.vertex_count() * std::log(4.0 / 3.0)).epsilon(1e-12));
  }
}

TEST_CASE("pair objective values at the uniform point") {
  // psi(x0) = ((d-1) d^(d-2))^(dg)
  const auto banana = make_parallel_edges(3);
  const PairIndex P(banana);
  const auto f = second_moment_objective(banana, P);
  Eigen::VectorXd x0(P.dim());
  x0.setConstant(1.0 / 9.0);
  CHECK(f.psi(x0) == doctest::Approx(std::pow(6.0, 6.0)).epsilon(1e-9));
  CHECK(f.phi(x0) == doctest::Approx(2 * std::log(4.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("second-moment asymptotics of the worked examples") {
  const auto k4 = make_complete_graph(4);
  const auto ak4 = asymptotic_second_moment(k4, build_matrices(k4));
  // det(-H|_V) = 2^-22 3^28 5^-1 11^3
  const double detk4 = std::pow(2.0, -22) * std::pow(3.0, 28) * std::pow(11.0, 3) / 5.0;
  CHECK(ak4.analytic.det_neg_hess_restricted == doctest::Approx(detk4).epsilon(1e-6));
  // E[X^2] ~ 2^16 3^-9/2 5^-1 11^-3/2 (4/3)^(4n)
  const double ck4 =
      std::pow(2.0, 16) * std::pow(3.0, -4.5) * std::pow(11.0, -1.5) / 5.0;
  CHECK(ak4.analytic.constant == doctest::Approx(ck4).epsilon(1e-6));
  CHECK(ak4.analytic.poly_power == Rat(0));
  CHECK(ak4.analytic.exp_rate == doctest::Approx(4 * std::log(4.0 / 3.0)).epsilon(1e-12));
  CHECK(ak4.maximizer_status == "proven");
  CHECK(ak4.rel_gap < 1e-6);

  const auto banana = make_parallel_edges(3);
  const auto ab = asymptotic_second_moment(banana, build_matrices(banana));
  const double detb = std::pow(2.0, -16) * std::pow(3.0, 18) * 25.0;
  CHECK(ab.analytic.det_neg_hess_restricted == doctest::Approx(detb).epsilon(1e-6));
  // E[X^2] ~ 2^11 3^-9/2 5^-1 pi n (4/3)^(2n)
  const double cb = std::pow(2.0, 11) * std::pow(3.0, -4.5) / 5.0 * std::numbers::pi;
  CHECK(ab.analytic.constant == doctest::Approx(cb).epsilon(1e-6));
  CHECK(ab.analytic.poly_power == Rat(1));
  CHECK(ab.analytic.exp_rate == doctest::Approx(2 * std::log(4.0 / 3.0)).epsilon(1e-12));

  CHECK_THROWS_AS(asymptotic_second_moment(make_cycle(6), build_matrices(make_cycle(6))),
                  validation_error);
}

TEST_CASE("second-moment asymptotics on the prism") {
  // no closed-form target; the two assembly routes checking each other to
  // 1e-6 inside asymptotic_second_moment is the test
  const auto prism = make_prism3();
  const auto asym = asymptotic_second_moment(prism, build_matrices(prism));
  CHECK(asym.rel_gap < 1e-6);
  CHECK(asym.maximizer_status == "proven");
  CHECK(asym.analytic.constant > 0);
}

TEST_CASE("degree four maximizer is reported as heuristic") {
  const auto k2_4 = make_parallel_edges(4);
  const auto rep = verify_phi2_maximizer(k2_4, build_matrices(k2_4));
  CHECK(rep.status == "heuristic-unique");
  CHECK(rep.deviation_from_uniform < 1e-8);
  const auto asym = asymptotic_second_moment(k2_4, build_matrices(k2_4));
  CHECK(asym.maximizer_status == "heuristic-unique");
}
