#pragma once

#include "octa/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace octa {

inline constexpr const char* kCsvVersion = "octa-csv v1";

/// Batch experiment description, read from a flat key=value file.
struct ExperimentConfig {
  std::string experiment;  ///< dichotomy | witness-suite | certify | cutcone-scan
  std::uint64_t seed = 1;
  double tolerance = 1e-5;  ///< verifier slack
  int starts = 8;
  double grid = 1e-3;
  int cuts = 2000;
  int budget = 10000;  ///< configuration-search budget
  int trials = 10;     ///< instances per witness kind / cutcone scan
  int families = 2;
  int k = 3;
  int points = 6;  ///< configuration size for cutcone-scan
  std::vector<double> p{1.0, 3.0};
  std::vector<int> n{3};
  std::vector<int> m{8, 16};
  std::string output;
  bool break_witness = false;  ///< debug: corrupt every generated witness
};

/// Parses key=value lines; '#' starts a comment. Unknown keys and
/// malformed values raise Error("line N: ...").
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig read_config_file(const std::string& path);
void validate(const ExperimentConfig& cfg);

struct ExperimentResult {
  std::string csv;
  int rows = 0;
  int errors = 0;           ///< sub-runs marked ERROR
  int failed_verifiers = 0;
  bool ok() const { return failed_verifiers == 0; }
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Number with 9 significant digits; inf/nan spelled out.
std::string csv_number(double x);
/// Comma- and newline-free text for a CSV cell.
std::string csv_text(const std::string& s);
/// Parses a comma list of exponents, `inf` allowed.
std::vector<double> parse_p_list(const std::string& s);
std::vector<int> parse_int_list(const std::string& s);

/// Per-kind outcome of the witness suite.
struct WitnessSuiteRow {
  std::string kind;
  int instances = 0;
  int applicable = 0;      ///< instances the proof bound covers
  double min_value = 0.0;  ///< smallest verified quantity (additivity: largest error)
  std::string bound;       ///< the proof bound checked, as text
  bool passed = false;
  std::string error;
};

/// Seeded witness instances: shift (eps 0.05, families of <= 3 operators
/// into lp(1,m), m <= 12), interval (wl1(16), eps 0.1), rank-one
/// (lp(inf,4) (x) lp(1,4)), sup-alt (lp(inf,6)) and oplus1 additivity.
std::vector<WitnessSuiteRow> witness_suite(int trials, std::uint64_t seed, double tolerance, bool break_witness);

}  // namespace octa
