#pragma once

#include <cstdint>
#include <vector>

#include "liftpm/exact.hpp"
#include "liftpm/multigraph.hpp"

namespace liftpm {

// Explicit multigraph for exact counting; capped at 128 vertices (the
// matching counter memoizes on two-word vertex masks).
class CountGraph {
 public:
  explicit CountGraph(int vertices);
  void add_edge(int u, int v, long multiplicity = 1);
  int vertex_count() const { return n_; }
  long multiplicity(int u, int v) const;
  const std::vector<std::pair<int, long>>& neighbors(int v) const { return adj_[v]; }
  long total_edges() const;  // with multiplicity

 private:
  int n_ = 0;
  std::vector<std::vector<std::pair<int, long>>> adj_;
};

// Exact number of perfect matchings, parallel edges counted separately.
// Branches on a minimum-degree vertex with forced-edge reduction, component
// splitting, cycle closed forms, and memoization on component vertex masks.
Int count_perfect_matchings(const CountGraph& H);

// Simple-cycle counts Z_2..Z_kmax (index 0,1 unused); 2-cycles are pairs of
// parallel edges, longer cycles are counted once via the (minimum root,
// smaller direction) canonical orientation. kmax is capped at 12.
std::vector<Int> count_k_cycles(const CountGraph& H, int kmax);

// Random n-lift: one uniform fiber permutation per base edge, keyed by
// (seed, edge, trial) so fibers are independent and reproducible.
struct Lift {
  const Multigraph* base = nullptr;
  int n = 0;
  std::vector<std::vector<int>> fibers;  // per edge e: a -> pi_e(a)

  int vertex(int base_vertex, int a) const { return base_vertex * n + a; }
  int vertex_count() const { return base->vertex_count() * n; }
  CountGraph to_count_graph() const;
};

Lift sample_lift(const Multigraph& G, int n, std::uint64_t seed, std::uint64_t trial = 0);

// Exact moments by iterating every fiber tuple; requires (n!)^h <= budget.
struct ExhaustiveMoments {
  long long lift_count = 0;
  Rat mean_x = Rat(0);
  Rat mean_x2 = Rat(0);
  std::vector<Rat> mean_zk;    // index k, 0..kmax
  std::vector<Rat> mean_x_zk;  // index k, 0..kmax
};

ExhaustiveMoments exhaustive_lift_oracle(const Multigraph& G, int n, int kmax = 0,
                                         std::uint64_t budget = 1'000'000);

struct SimEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double target = 0.0;  // analytic comparison value when available
  double z_score = 0.0;
};

struct SimReport {
  int n = 0;
  int trials = 0;
  int kmax = 0;
  std::uint64_t seed = 0;
  SimEstimate mean_x;
  SimEstimate mean_x2;
  std::vector<SimEstimate> mean_zk;     // vs lambda_k
  std::vector<SimEstimate> var_zk;      // vs lambda_k
  std::vector<SimEstimate> xzk_ratio;   // E[X Z_k]/E[X] vs mu_k
  std::vector<double> x_samples;        // per trial
  std::vector<std::vector<long>> z_samples;  // per trial, index k
};

// Monte Carlo moment estimates with exact per-trial matching counts.
// Comparison targets (lambda_k, mu_k) are filled for regular graphs.
SimReport monte_carlo_moments(const Multigraph& G, int n, int trials, int kmax,
                              std::uint64_t seed, int threads = 1);

}  // namespace liftpm
