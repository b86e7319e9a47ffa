#include <doctest.h>

#include <cmath>

#include "liftpm/errors.hpp"
#include "liftpm/matrices.hpp"
#include "liftpm/multigraph.hpp"

using namespace liftpm;

TEST_CASE("graph loading and validation") {
  const auto k4 = Multigraph::from_json(
      R"({"g": 4, "edges": [[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]})");
  CHECK(k4.vertex_count() == 4);
  CHECK(k4.edge_count() == 6);

  const auto banana = Multigraph::from_json(R"({"g": 2, "edges": [[0,1],[0,1],[0,1]]})");
  CHECK(banana.vertex_count() == 2);
  CHECK(banana.edge_count() == 3);
  CHECK(banana.regular_degree() == 3);

  CHECK_THROWS_AS(Multigraph::from_json(R"({"g": 2, "edges": [[0,0]]})"), validation_error);
  CHECK_THROWS_AS(Multigraph::from_json(R"({"g": 3, "edges": [[0,1]]})"), validation_error);
  CHECK_THROWS_AS(Multigraph::from_json(R"({"g": 2, "edges": [[0,5]]})"), validation_error);
  CHECK_THROWS_AS(Multigraph::from_json("not json"), validation_error);
}

TEST_CASE("bipartition") {
  CHECK_FALSE(make_complete_graph(4).is_bipartite());
  const auto parts = make_parallel_edges(3).bipartition();
  REQUIRE(parts.has_value());
  CHECK((*parts)[0] != (*parts)[1]);
  CHECK(make_cycle(6).is_bipartite());
  CHECK_FALSE(make_cycle(5).is_bipartite());
  CHECK_FALSE(make_petersen().is_bipartite());
  CHECK_FALSE(make_prism3().is_bipartite());
}

TEST_CASE("graph matrices and their identities") {
  for (const auto& G : {make_complete_graph(4), make_parallel_edges(3), make_cycle(6),
                        make_petersen(), make_prism3(), make_path(3)}) {
    const auto M = build_matrices(G);
    CHECK(matrix_identities_hold(M));
    double trace = 0;
    for (double a : M.alphas) trace += a;
    CHECK(std::abs(trace) < 1e-8);
  }

  const auto banana = build_matrices(make_parallel_edges(3));
  CHECK(banana.adjacency[0][1] == 3);
  CHECK(banana.adjacency[1][0] == 3);
  CHECK(banana.alphas[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(banana.alphas[1] == doctest::Approx(-3.0).epsilon(1e-12));

  const auto k4 = build_matrices(make_complete_graph(4));
  CHECK(k4.alphas[0] == doctest::Approx(3.0).epsilon(1e-12));
  for (int i = 1; i < 4; ++i) CHECK(k4.alphas[i] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("symmetric eigenvalue properties on regular graphs") {
  for (const auto& G : {make_complete_graph(4), make_parallel_edges(3), make_cycle(6),
                        make_petersen(), make_prism3()}) {
    const auto M = build_matrices(G);
    const auto d = G.regular_degree();
    REQUIRE(d.has_value());
    CHECK(std::abs(M.alphas.front() - double(*d)) < 1e-10);
    const bool has_minus_d = std::abs(M.alphas.back() + double(*d)) < 1e-8;
    CHECK(has_minus_d == G.is_bipartite());
  }
}

TEST_CASE("jacobi eigensolver basics") {
  Eigen::MatrixXd I3 = Eigen::MatrixXd::Identity(3, 3);
  const auto eig = symmetric_eigenvalues(I3);
  for (double v : eig) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

  Eigen::MatrixXd bad(2, 2);
  bad << 0, 1, 2, 0;
  CHECK_THROWS_AS(symmetric_eigenvalues(bad), validation_error);
}
