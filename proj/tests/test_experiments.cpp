#include "doctest.h"

#include "octa/experiments.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <sys/wait.h>

using namespace octa;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const int status = std::system((std::string(OCTA_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string temp_path(const std::string& name) { return std::string(OCTA_TEST_TMP) + "/" + name; }

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_config(
      "# comment\n"
      "experiment = dichotomy\n"
      "p = 1, 3, inf   # trailing comment\n"
      "n = 3\n"
      "m = 8,16\n"
      "k = 3\n"
      "seed = 7\n"
      "break_witness = false\n");
  CHECK(cfg.experiment == "dichotomy");
  REQUIRE(cfg.p.size() == 3);
  CHECK(cfg.p[2] == std::numeric_limits<double>::infinity());
  CHECK(cfg.m == std::vector<int>{8, 16});
  CHECK(cfg.seed == 7);

  CHECK_THROWS_WITH_AS(parse_config("experiment = dichotomy\nstarts = 3\nfoo = 1\n"), "line 3: unknown key 'foo'", Error);
  CHECK_THROWS_WITH_AS(parse_config("experiment = dichotomy\nk\n"), "line 2: expected key=value", Error);
  CHECK_THROWS_WITH_AS(parse_config("experiment = dichotomy\nk = 3x\n"), "line 2: malformed value '3x' for 'k'", Error);
  CHECK_THROWS_WITH_AS(parse_config("experiment = dichotomy\np = 0.5\n"), "line 2: p must lie in [1, inf]", Error);
  CHECK_THROWS_WITH_AS(parse_config("experiment = dichotomy\nbudget = 0\n"), "line 2: budgets must be positive", Error);
  CHECK_THROWS_WITH_AS(parse_config("experiment = plot\n"), "line 1: unknown experiment 'plot'", Error);
  CHECK_THROWS_AS(parse_config("seed = 1\n"), Error);
}

TEST_CASE("csv number format") {
  CHECK(csv_number(2.0) == "2");
  CHECK(csv_number(1.0 / 3.0) == "0.333333333");
  CHECK(csv_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(csv_text("a,b\nc") == "a;b;c");
}

TEST_CASE("witness suite passes and the debug flag breaks it") {
  ExperimentConfig cfg;
  cfg.experiment = "witness-suite";
  cfg.trials = 4;
  cfg.seed = 7;
  const auto r = run_experiment(cfg);
  CHECK(r.ok());
  CHECK(r.errors == 0);
  CHECK(r.rows == 5);
  CHECK(r.csv.rfind("# octa-csv v1 experiment=witness-suite seed=7\n", 0) == 0);

  cfg.break_witness = true;
  const auto broken = run_experiment(cfg);
  CHECK_FALSE(broken.ok());
  CHECK(broken.failed_verifiers == 5);
}

TEST_CASE("certify on l2 gives an ERROR row and continues") {
  ExperimentConfig cfg;
  cfg.experiment = "certify";
  cfg.p = {2.0, 2.0};
  cfg.n = {3};
  cfg.m = {8};
  cfg.budget = 50;
  const auto r = run_experiment(cfg);
  CHECK(r.ok());
  CHECK(r.errors == 2);
  CHECK(r.csv.find("2,3,8,NA,NA,NA,NA,ERROR obstruction not established\n") != std::string::npos);
}

TEST_CASE("cutcone scan") {
  ExperimentConfig cfg;
  cfg.experiment = "cutcone-scan";
  cfg.p = {2.0};
  cfg.n = {3};
  cfg.points = 5;
  cfg.budget = 20;
  const auto r = run_experiment(cfg);
  CHECK(r.ok());
  CHECK(r.csv.find("lp:2:3,5,20,1,inconclusive,feasible,NA,verified") != std::string::npos);
}

TEST_CASE("cli: exit status and byte-identical reruns") {
  const std::string cfg = temp_path("suite.cfg");
  {
    std::ofstream f(cfg);
    f << "experiment = witness-suite\ntrials = 3\nseed = 11\n";
  }
  const std::string a = temp_path("a.csv"), b = temp_path("b.csv");
  CHECK(cli("--out " + a + " run " + cfg) == 0);
  CHECK(cli("--jobs 3 --out " + b + " run " + cfg) == 0);
  CHECK(!slurp(a).empty());
  CHECK(slurp(a) == slurp(b));
  CHECK(cli("--out " + b + " --debug-break-witness run " + cfg) == 1);

  const std::string bad = temp_path("bad.cfg");
  {
    std::ofstream f(bad);
    f << "experiment = witness-suite\ntrails = 3\n";
  }
  CHECK(cli("run " + bad) == 2);
  CHECK(cli("norm --space lp:2:2 --vector \"3 4\"") == 0);
  CHECK(cli("norm --space lp:2:2") != 0);
}
