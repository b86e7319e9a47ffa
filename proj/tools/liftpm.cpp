// Command-line front end: moment analysis, cycle statistics, and Monte
// Carlo simulation for random n-lifts of a loop-free multigraph.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "liftpm/errors.hpp"
#include "liftpm/first_moment.hpp"
#include "liftpm/lattice.hpp"
#include "liftpm/lift_sim.hpp"
#include "liftpm/matrices.hpp"
#include "liftpm/multigraph.hpp"
#include "liftpm/nb_walks.hpp"
#include "liftpm/report.hpp"
#include "liftpm/second_moment.hpp"

namespace {

using liftpm::Json;

struct CommonOpts {
  std::string graph_path;
  std::string out_path;
  std::vector<long> n_grid;
  long n = 0;
  int trials = 2000;
  int kmax = 8;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::uint64_t cap = 10'000'000;
  int threads = 1;
  std::string csv_path;
};

Json config_json(const std::string& command, const CommonOpts& o) {
  Json j;
  j["command"] = command;
  j["graph"] = o.graph_path;
  if (!o.n_grid.empty()) j["n_grid"] = o.n_grid;
  if (o.n > 0) j["n"] = o.n;
  j["kmax"] = o.kmax;
  j["cap"] = o.cap;
  if (o.seed_set) {
    j["seed"] = o.seed;
    j["trials"] = o.trials;
    j["threads"] = o.threads;
  }
  j["version"] = liftpm::kArtifactVersion;
  return j;
}

void emit(const Json& j, const CommonOpts& o) {
  if (o.out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(o.out_path);
    if (!out) throw liftpm::validation_error("cannot open output path " + o.out_path);
    out << j.dump(2) << "\n";
  }
}

Json moment_rows(const liftpm::Multigraph& G, const liftpm::GraphMatrices& M,
                 const std::vector<long>& grid, const liftpm::AsymptoticEstimate* est,
                 bool second, std::uint64_t cap) {
  Json rows = Json::array();
  for (long n : grid) {
    Json row;
    row["n"] = n;
    const liftpm::Rat exact = second ? liftpm::exact_second_moment(G, n, cap)
                                     : liftpm::exact_first_moment(G, M, n, cap);
    row["exact"] = liftpm::rat_json(exact);
    if (est) {
      const double approx = est->value_at(double(n));
      row["asymptotic"] = liftpm::fmt_double(approx);
      row["ratio"] =
          liftpm::fmt_double(approx != 0 ? exact.get_d() / approx : 0.0);
    }
    rows.push_back(row);
  }
  return rows;
}

int run_analyze(const CommonOpts& o) {
  const auto G = liftpm::Multigraph::from_file(o.graph_path);
  const auto M = liftpm::build_matrices(G);
  Json j;
  j["config"] = config_json("analyze", o);
  Json graph;
  graph["g"] = G.vertex_count();
  graph["h"] = G.edge_count();
  const auto d = G.regular_degree();
  graph["regular_degree"] = d ? Json(*d) : Json(nullptr);
  const auto parts = G.bipartition();
  graph["bipartite"] = parts.has_value();
  if (parts) graph["coloring"] = *parts;
  Json alphas = Json::array();
  for (double a : M.alphas) alphas.push_back(liftpm::fmt_double(a));
  graph["adjacency_eigenvalues"] = alphas;
  graph["incidence_identities_hold"] = liftpm::matrix_identities_hold(M);
  j["graph"] = graph;

  const auto z = liftpm::fractional_pm(G);
  if (z) {
    Json zj = Json::array();
    for (const auto& v : *z) zj.push_back(liftpm::rat_json(v));
    j["fractional_pm"] = zj;
  } else {
    j["fractional_pm"] = Json(nullptr);
  }

  j["first_moment_lattice"] = liftpm::lattice_json(liftpm::first_moment_lattice(G, M));
  if (d && *d >= 3)
    j["second_moment_lattice"] =
        liftpm::lattice_json(liftpm::second_moment_lattice(G, M), false);
  emit(j, o);
  return 0;
}

int run_first_moment(const CommonOpts& o) {
  const auto G = liftpm::Multigraph::from_file(o.graph_path);
  const auto M = liftpm::build_matrices(G);
  Json j;
  j["config"] = config_json("first-moment", o);
  const liftpm::AsymptoticEstimate* est = nullptr;
  std::optional<liftpm::FirstMomentAsymptotics> asym;
  if (const auto d = G.regular_degree(); d && *d >= 3) {
    asym = liftpm::asymptotic_first_moment(G, M);
    j["asymptotic"] = liftpm::estimate_json(asym->closed_form);
    j["asymptotic"]["symbolic"] = asym->symbolic.str();
    j["engine_rel_gap"] = liftpm::fmt_double(asym->rel_gap);
    est = &asym->closed_form;
  } else {
    j["asymptotic"] = Json(nullptr);
    j["note"] = "asymptotics are certified for regular graphs only; exact sums provided";
  }
  j["rows"] = moment_rows(G, M, o.n_grid, est, false, o.cap);
  emit(j, o);
  return 0;
}

int run_second_moment(const CommonOpts& o) {
  const auto G = liftpm::Multigraph::from_file(o.graph_path);
  const auto M = liftpm::build_matrices(G);
  Json j;
  j["config"] = config_json("second-moment", o);
  const auto asym = liftpm::asymptotic_second_moment(G, M);
  j["asymptotic"] = liftpm::estimate_json(asym.analytic);
  j["engine_rel_gap"] = liftpm::fmt_double(asym.rel_gap);
  j["maximizer_status"] = asym.maximizer_status;
  j["rows"] = moment_rows(G, M, o.n_grid, &asym.analytic, true, o.cap);
  emit(j, o);
  return 0;
}

int run_cycles(const CommonOpts& o) {
  const auto G = liftpm::Multigraph::from_file(o.graph_path);
  const auto M = liftpm::build_matrices(G);
  const auto cs = liftpm::cycle_series(G, M, o.kmax);
  Json j;
  j["config"] = config_json("cycles", o);
  Json rows = Json::array();
  for (int k = 2; k <= cs.kmax; ++k) {
    Json row;
    row["k"] = k;
    row["w_k"] = cs.w[k].get_str();
    row["lambda_k"] = liftpm::fmt_double(cs.lambda[k]);
    row["delta_k"] = liftpm::fmt_double(cs.delta[k]);
    row["mu_k"] = liftpm::fmt_double(cs.mu[k]);
    rows.push_back(row);
  }
  j["rows"] = rows;
  j["ssc_constant"] = liftpm::fmt_double(cs.ssc);
  j["ssc_symbolic"] = cs.ssc_factored.str();
  j["truncation_tail_bound"] = liftpm::fmt_double(cs.truncation_tail_bound);
  emit(j, o);
  return 0;
}

int run_ssc_check(const CommonOpts& o) {
  const auto G = liftpm::Multigraph::from_file(o.graph_path);
  const auto M = liftpm::build_matrices(G);
  const auto a4 = liftpm::a4_check(G, M);
  const auto ssc = liftpm::ssc_constant(G, M);
  Json j;
  j["config"] = config_json("ssc-check", o);
  j["lhs"] = liftpm::fmt_double(a4.lhs);
  j["rhs"] = liftpm::fmt_double(a4.rhs);
  j["power_cancel"] = a4.power_cancel;
  j["pass"] = a4.pass;
  j["ssc_symbolic"] = ssc.factored.str();
  j["ssc_eld_route"] = liftpm::fmt_double(ssc.eld_value);
  j["ssc_cw_route"] = liftpm::fmt_double(ssc.cw_value);
  emit(j, o);
  return 0;
}

int run_simulate(const CommonOpts& o) {
  if (!o.seed_set) throw liftpm::validation_error("simulate requires --seed");
  const auto G = liftpm::Multigraph::from_file(o.graph_path);
  const auto rep = liftpm::monte_carlo_moments(G, static_cast<int>(o.n), o.trials, o.kmax,
                                               o.seed, o.threads);
  Json j;
  j["config"] = config_json("simulate", o);
  j["report"] = liftpm::sim_report_json(rep);
  if (const auto d = G.regular_degree(); d && *d >= 3) {
    const auto M = liftpm::build_matrices(G);
    const auto first = liftpm::asymptotic_first_moment(G, M);
    const auto second = liftpm::asymptotic_second_moment(G, M);
    Json targets;
    targets["asymptotic_mean_X"] =
        liftpm::fmt_double(first.closed_form.value_at(double(o.n)));
    targets["asymptotic_mean_X2"] = liftpm::fmt_double(second.analytic.value_at(double(o.n)));
    targets["maximizer_status"] = second.maximizer_status;
    j["targets"] = targets;
  }
  emit(j, o);
  if (!o.csv_path.empty()) {
    std::ofstream csv(o.csv_path);
    if (!csv) throw liftpm::validation_error("cannot open CSV path " + o.csv_path);
    csv << liftpm::sim_report_csv(rep);
  }
  return 0;
}

int run_exact(const CommonOpts& o) {
  const auto G = liftpm::Multigraph::from_file(o.graph_path);
  const auto res = liftpm::exhaustive_lift_oracle(G, static_cast<int>(o.n), o.kmax, o.cap);
  Json j;
  j["config"] = config_json("exact", o);
  j["lift_count"] = res.lift_count;
  j["mean_X"] = liftpm::rat_json(res.mean_x);
  j["mean_X2"] = liftpm::rat_json(res.mean_x2);
  Json zk = Json::array();
  for (int k = 2; k <= o.kmax && k < static_cast<int>(res.mean_zk.size()); ++k) {
    Json row;
    row["k"] = k;
    row["mean_Zk"] = liftpm::rat_json(res.mean_zk[k]);
    row["mean_X_Zk"] = liftpm::rat_json(res.mean_x_zk[k]);
    zk.push_back(row);
  }
  j["cycles"] = zk;
  emit(j, o);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moments of perfect matching counts in random graph lifts"};
  app.require_subcommand(1);

  CommonOpts o;
  const auto add_common = [&](CLI::App* cmd, bool needs_n, bool sim) {
    cmd->add_option("--graph", o.graph_path, "graph JSON file {\"g\":..,\"edges\":[[i,j],..]}")
        ->required();
    cmd->add_option("--out", o.out_path, "write the JSON report here instead of stdout");
    cmd->add_option("--kmax", o.kmax, "largest cycle length tracked");
    cmd->add_option("--cap", o.cap, "enumeration budget");
    if (needs_n) cmd->add_option("--n", o.n, "lift size")->required();
    if (sim) {
      cmd->add_option("--trials", o.trials, "Monte Carlo trials");
      cmd->add_option("--seed", o.seed, "stream seed")->each([&](const std::string&) {
        o.seed_set = true;
      });
      cmd->add_option("--threads", o.threads, "worker threads (default 1, reproducible)");
      cmd->add_option("--csv", o.csv_path, "also write one CSV row per trial here");
    }
  };

  auto* analyze = app.add_subcommand("analyze", "graph, matrices, and lattice reports");
  add_common(analyze, false, false);
  auto* first = app.add_subcommand("first-moment", "exact and asymptotic E[X]");
  add_common(first, false, false);
  first->add_option("--n-grid", o.n_grid, "lift sizes for exact sums")->delimiter(',');
  auto* second = app.add_subcommand("second-moment", "exact and asymptotic E[X^2]");
  add_common(second, false, false);
  second->add_option("--n-grid", o.n_grid, "lift sizes for exact sums")->delimiter(',');
  auto* cycles = app.add_subcommand("cycles", "non-backtracking cycle statistics");
  add_common(cycles, false, false);
  auto* ssc = app.add_subcommand("ssc-check", "moment ratio vs conditioning constant");
  add_common(ssc, false, false);
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo moments of random lifts");
  add_common(simulate, true, true);
  auto* exact = app.add_subcommand("exact", "exhaustive small-lift oracle");
  add_common(exact, true, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // CLI11 prints help text itself for --help
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (analyze->parsed()) return run_analyze(o);
    if (first->parsed()) return run_first_moment(o);
    if (second->parsed()) return run_second_moment(o);
    if (cycles->parsed()) return run_cycles(o);
    if (ssc->parsed()) return run_ssc_check(o);
    if (simulate->parsed()) return run_simulate(o);
    if (exact->parsed()) return run_exact(o);
  } catch (const liftpm::budget_error& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return 3;
  } catch (const liftpm::validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
