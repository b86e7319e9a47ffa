#include <doctest.h>

#include <cmath>
#include <numeric>

#include "liftpm/errors.hpp"
#include "liftpm/matrices.hpp"
#include "liftpm/multigraph.hpp"
#include "liftpm/nb_walks.hpp"

using namespace liftpm;

namespace {

// independent oracle: enumerate closed non-backtracking k-walks directly
long brute_nb_walks(const Multigraph& G, int k) {
  // sequences of directed edges with tail(next) == head(cur) and
  // edge(next) != edge(cur), closed when the last head equals the first
  // tail and the last edge differs from the first
  long count = 0;
  std::vector<std::pair<int, int>> directed;  // (edge, orientation)
  for (int e = 0; e < G.edge_count(); ++e) {
    directed.push_back({e, 0});
    directed.push_back({e, 1});
  }
  const auto tail_of = [&](const std::pair<int, int>& de) {
    return de.second == 0 ? G.edge(de.first).u : G.edge(de.first).v;
  };
  const auto head_of = [&](const std::pair<int, int>& de) {
    return de.second == 0 ? G.edge(de.first).v : G.edge(de.first).u;
  };
  std::vector<std::pair<int, int>> walk;
  const auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(walk.size()) == k) {
      if (head_of(walk.back()) == tail_of(walk.front()) &&
          walk.back().first != walk.front().first)
        ++count;
      return;
    }
    for (const auto& de : directed) {
      if (tail_of(de) != head_of(walk.back()) || de.first == walk.back().first) continue;
      walk.push_back(de);
      self(self);
      walk.pop_back();
    }
  };
  for (const auto& de : directed) {
    walk.assign(1, de);
    rec(rec);
  }
  return count;
}

}  // namespace

TEST_CASE("non-backtracking matrix shape and row sums") {
  const auto k4 = make_complete_graph(4);
  const auto R = nb_matrix(k4);
  CHECK(R.dim == 12);
  for (int i = 0; i < R.dim; ++i)
    CHECK(std::accumulate(R.entries[i].begin(), R.entries[i].end(), 0) == 2);

  const auto banana = make_parallel_edges(3);
  const auto Rb = nb_matrix(banana);
  CHECK(Rb.dim == 6);
  for (int i = 0; i < Rb.dim; ++i)
    CHECK(std::accumulate(Rb.entries[i].begin(), Rb.entries[i].end(), 0) == 2);

  // all-ones is an eigenvector with eigenvalue d-1: row sums constant
}

TEST_CASE("walk counts: trace, spectrum, and brute force agree") {
  for (const auto& G : {make_complete_graph(4), make_parallel_edges(3), make_petersen(),
                        make_prism3()}) {
    const auto M = build_matrices(G);
    const auto w = walk_counts(G, M, 12);  // internally checks trace == spectral
    for (int k = 2; k <= 6; ++k) CHECK(w[k] == brute_nb_walks(G, k));
  }
}

TEST_CASE("walk counts of the worked examples") {
  const auto k4 = make_complete_graph(4);
  const auto wk4 = walk_counts(k4, build_matrices(k4), 4);
  CHECK(wk4[2] == 0);
  CHECK(wk4[3] == 24);  // 4 triangles, rooted and oriented

  const auto banana = make_parallel_edges(3);
  const auto wb = walk_counts(banana, build_matrices(banana), 8);
  // w_k = 2*2^k + 4 for even k, 0 for odd k
  CHECK(wb[2] == 12);
  CHECK(wb[3] == 0);
  CHECK(wb[4] == 36);
  CHECK(wb[5] == 0);
  CHECK(wb[6] == 132);
}

TEST_CASE("cycle series of the worked examples") {
  const auto k4 = make_complete_graph(4);
  const auto cs = cycle_series(k4, build_matrices(k4), 8);
  CHECK(cs.lambda[3] == doctest::Approx(4.0));
  CHECK(cs.delta[3] == doctest::Approx(-0.125));
  CHECK(cs.mu[3] == doctest::Approx(3.5));
  CHECK(cs.delta[2] == doctest::Approx(0.25));

  const auto banana = make_parallel_edges(3);
  const auto csb = cycle_series(banana, build_matrices(banana), 8);
  CHECK(csb.lambda[2] == doctest::Approx(3.0));
  CHECK(csb.mu[2] == doctest::Approx(3.75));
  for (int k = 3; k <= 7; k += 2) CHECK(csb.lambda[k] == 0.0);

  // delta shrinks geometrically with ratio 1/(d-1)
  for (int k = 2; k < 8; ++k)
    CHECK(std::abs(cs.delta[k + 1] / cs.delta[k]) == doctest::Approx(0.5));
}

TEST_CASE("ssc constants of the worked examples") {
  const auto k4 = make_complete_graph(4);
  const auto sk4 = ssc_constant(k4, build_matrices(k4));
  const double expected_k4 =
      std::pow(2.0, 10) * std::pow(3.0, -1.5) * std::pow(11.0, -1.5) / 5.0;
  CHECK(sk4.paths_agree);
  CHECK(sk4.cw_value == doctest::Approx(expected_k4).epsilon(1e-9));
  CHECK(sk4.eld_value == doctest::Approx(expected_k4).epsilon(1e-9));
  CHECK(sk4.factored.str() == "2^10 * 3^-3/2 * 5^-1 * 11^-3/2");

  const auto banana = make_parallel_edges(3);
  const auto sb = ssc_constant(banana, build_matrices(banana));
  CHECK(sb.cw_value ==
        doctest::Approx(std::pow(2.0, 5) * std::pow(3.0, -1.5) / 5.0).epsilon(1e-9));

  const auto k2_4 = make_parallel_edges(4);
  const auto s4 = ssc_constant(k2_4, build_matrices(k2_4));
  CHECK(s4.cw_value ==
        doctest::Approx(std::pow(2.0, -7.5) * std::pow(3.0, 7) * std::pow(5.0, -1.5))
            .epsilon(1e-9));
}

TEST_CASE("truncated series increases toward the ssc constant") {
  for (const auto& G : {make_complete_graph(4), make_parallel_edges(3), make_prism3()}) {
    const auto M = build_matrices(G);
    const auto cs = cycle_series(G, M, 20);
    const double limit = std::log(cs.ssc);
    double partial = 0;
    double previous = -1;
    for (int k = 1; k <= 20; ++k) {
      partial += cs.lambda[k] * cs.delta[k] * cs.delta[k];
      CHECK(partial >= previous);
      CHECK(partial <= limit + 1e-9);
      previous = partial;
    }
    CHECK(limit - partial <= cs.truncation_tail_bound + 1e-12);
  }
}

TEST_CASE("moment ratio closes against the conditioning constant") {
  const auto k4 = make_complete_graph(4);
  const auto a4k4 = a4_check(k4, build_matrices(k4));
  CHECK(a4k4.power_cancel);
  CHECK(a4k4.pass);
  CHECK(a4k4.lhs == doctest::Approx(a4k4.rhs).epsilon(1e-6));

  const auto banana = make_parallel_edges(3);
  const auto a4b = a4_check(banana, build_matrices(banana));
  CHECK(a4b.power_cancel);  // (pi n)^(1/2) squared cancels against pi n
  CHECK(a4b.pass);

  // the closure also holds on a 3-regular graph outside the worked examples
  const auto prism = make_prism3();
  const auto a4p = a4_check(prism, build_matrices(prism));
  CHECK(a4p.pass);

  // negative control: a perturbed rhs must fail the 1e-6 gate
  CHECK(std::abs(a4k4.lhs / (a4k4.rhs * 1.01) - 1.0) > 1e-6);
}

TEST_CASE("limit variable samples") {
  const auto k4 = make_complete_graph(4);
  const auto M = build_matrices(k4);
  const auto samples = sample_limit_W(k4, M, 20, 100000, 2024);
  CHECK(samples.size() == 100000);
  double mean = 0;
  for (double w : samples) {
    CHECK(w > 0.0);
    mean += w;
  }
  mean /= samples.size();
  // E[W] = 1; Var W = ssc - 1
  const double ssc = ssc_constant(k4, M).cw_value;
  const double se = std::sqrt((ssc - 1.0) / samples.size());
  CHECK(std::abs(mean - 1.0) < 3 * se);

  // deterministic under the seed
  const auto replay = sample_limit_W(k4, M, 20, 10, 2024);
  for (int i = 0; i < 10; ++i) CHECK(replay[i] == samples[i]);

  // bipartite graphs only have even-k factors; odd lambdas vanish so the
  // product over a kmax that cuts mid-pair is still well formed
  const auto banana = make_parallel_edges(3);
  const auto sb = sample_limit_W(banana, build_matrices(banana), 21, 10, 7);
  for (double w : sb) CHECK(w > 0.0);
}
