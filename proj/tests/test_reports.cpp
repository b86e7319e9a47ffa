#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "liftpm/lift_sim.hpp"
#include "liftpm/matrices.hpp"
#include "liftpm/multigraph.hpp"
#include "liftpm/report.hpp"

using namespace liftpm;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli(const std::string& args, const std::string& out_path) {
  const char* cli = std::getenv("LIFTPM_CLI");
  if (!cli) return -1;
  const std::string cmd = std::string(cli) + " " + args + " > " + out_path + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("rationals and doubles serialize deterministically") {
  CHECK(rat_json(make_rat(31, 3)).dump() == R"({"num":"31","den":"3"})");
  CHECK(rat_json(make_rat(-4, 8)).dump() == R"({"num":"-1","den":"2"})");
  CHECK(fmt_double(1.5) == "1.5");
  const double c = 8.0 / (3 * std::sqrt(3.0));
  CHECK(std::stod(fmt_double(c)) == doctest::Approx(c).epsilon(1e-14));
}

TEST_CASE("identical simulation config gives byte-identical reports") {
  const auto banana = make_parallel_edges(3);
  const auto rep1 = monte_carlo_moments(banana, 4, 150, 4, 77);
  const auto rep2 = monte_carlo_moments(banana, 4, 150, 4, 77);
  CHECK(sim_report_json(rep1).dump(2) == sim_report_json(rep2).dump(2));
  CHECK(sim_report_csv(rep1) == sim_report_csv(rep2));
  // threads must not change the result either
  const auto rep4 = monte_carlo_moments(banana, 4, 150, 4, 77, 4);
  CHECK(sim_report_json(rep1).dump(2) == sim_report_json(rep4).dump(2));
}

TEST_CASE("cli_reports: subcommands, exit codes, and determinism") {
  const char* cli = std::getenv("LIFTPM_CLI");
  if (!cli) return;  // available under ctest only
  const std::string data = LIFTPM_DATA_DIR;

  CHECK(run_cli("analyze --graph " + data + "/k4.json", "/tmp/liftpm_analyze.json") == 0);
  const auto analyze = slurp("/tmp/liftpm_analyze.json");
  CHECK(analyze.find("\"rank\": 2") != std::string::npos);

  CHECK(run_cli("first-moment --graph " + data + "/k4.json --n-grid 3,6",
                "/tmp/liftpm_fm1.json") == 0);
  CHECK(run_cli("first-moment --graph " + data + "/k4.json --n-grid 3,6",
                "/tmp/liftpm_fm2.json") == 0);
  CHECK(slurp("/tmp/liftpm_fm1.json") == slurp("/tmp/liftpm_fm2.json"));

  CHECK(run_cli("ssc-check --graph " + data + "/k4.json", "/tmp/liftpm_ssc.json") == 0);
  CHECK(slurp("/tmp/liftpm_ssc.json").find("\"pass\": true") != std::string::npos);

  CHECK(run_cli("cycles --graph " + data + "/k2_3.json --kmax 6",
                "/tmp/liftpm_cycles.json") == 0);

  CHECK(run_cli("simulate --graph " + data + "/k2_3.json --n 4 --trials 120 --seed 5 "
                "--kmax 4 --csv /tmp/liftpm_sim.csv",
                "/tmp/liftpm_sim.json") == 0);
  const auto csv = slurp("/tmp/liftpm_sim.csv");
  CHECK(csv.substr(0, 13) == "trial,X,Z2,Z3");

  CHECK(run_cli("exact --graph " + data + "/k2_3.json --n 2 --kmax 3",
                "/tmp/liftpm_exact.json") == 0);
  CHECK(slurp("/tmp/liftpm_exact.json").find("\"num\": \"6\"") != std::string::npos);

  // validation failures exit with 2
  CHECK(run_cli("analyze --graph /nonexistent.json", "/tmp/liftpm_bad.json") == 2);
  CHECK(run_cli("simulate --graph " + data + "/k4.json --n 4 --trials 10 --seed 1",
                "/tmp/liftpm_bad2.json") == 2);
  CHECK(run_cli("bogus-subcommand", "/tmp/liftpm_bad3.json") == 2);
  // budget failures exit with 3
  CHECK(run_cli("exact --graph " + data + "/k4.json --n 4", "/tmp/liftpm_bad4.json") == 3);
  CHECK(run_cli("first-moment --graph " + data + "/k4.json --n-grid 24 --cap 10",
                "/tmp/liftpm_bad5.json") == 3);
}
