#include "octa/experiments.hpp"

#include "octa/embeddability.hpp"
#include "octa/octahedral.hpp"
#include "octa/parallel.hpp"
#include "octa/random.hpp"
#include "octa/witnesses.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace octa {

std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

std::string csv_text(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& s) {
  if (s == "inf") return kInf;
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument(s);
  return v;
}

long long parse_integer(const std::string& s) {
  std::size_t pos = 0;
  const long long v = std::stoll(s, &pos);
  if (pos != s.size()) throw std::invalid_argument(s);
  return v;
}

}  // namespace

std::vector<double> parse_p_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(parse_double(item));
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split(s, ',')) out.push_back(static_cast<int>(parse_integer(item)));
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto here = "line " + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    require(eq != std::string::npos, here + "expected key=value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    require(!value.empty(), here + "missing value for '" + key + "'");
    try {
      if (key == "experiment") cfg.experiment = value;
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_integer(value));
      else if (key == "tolerance") cfg.tolerance = parse_double(value);
      else if (key == "starts") cfg.starts = static_cast<int>(parse_integer(value));
      else if (key == "grid") cfg.grid = parse_double(value);
      else if (key == "cuts") cfg.cuts = static_cast<int>(parse_integer(value));
      else if (key == "budget") cfg.budget = static_cast<int>(parse_integer(value));
      else if (key == "trials") cfg.trials = static_cast<int>(parse_integer(value));
      else if (key == "families") cfg.families = static_cast<int>(parse_integer(value));
      else if (key == "k") cfg.k = static_cast<int>(parse_integer(value));
      else if (key == "points") cfg.points = static_cast<int>(parse_integer(value));
      else if (key == "p") cfg.p = parse_p_list(value);
      else if (key == "n") cfg.n = parse_int_list(value);
      else if (key == "m") cfg.m = parse_int_list(value);
      else if (key == "output") cfg.output = value;
      else if (key == "break_witness") {
        require(value == "true" || value == "false", here + "break_witness must be true or false");
        cfg.break_witness = value == "true";
      } else {
        throw Error(here + "unknown key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw Error(here + "malformed value '" + value + "' for '" + key + "'");
    }
    try {
      validate(cfg);
    } catch (const Error& e) {
      throw Error(here + e.what());
    }
  }
  require(!cfg.experiment.empty(), "config: missing 'experiment'");
  return cfg;
}

ExperimentConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const ExperimentConfig& cfg) {
  static const std::vector<std::string> kinds{"dichotomy", "witness-suite", "certify", "cutcone-scan"};
  require(cfg.experiment.empty() || std::find(kinds.begin(), kinds.end(), cfg.experiment) != kinds.end(),
          "unknown experiment '" + cfg.experiment + "'");
  require(cfg.starts >= 0, "starts must be nonnegative");
  require(cfg.grid > 0.0 && cfg.tolerance > 0.0, "grid and tolerance must be positive");
  require(cfg.cuts > 0 && cfg.budget > 0 && cfg.trials > 0 && cfg.families > 0 && cfg.k > 0 && cfg.points > 1,
          "budgets must be positive");
  for (double p : cfg.p) require(p >= 1.0, "p must lie in [1, inf]");
  for (int n : cfg.n) require(n >= 1, "n must be positive");
  for (int m : cfg.m) require(m >= 1, "m must be positive");
}

// ---------------------------------------------------------------- witnesses

namespace {

Mat gaussian_matrix(int r, int c, std::mt19937_64& rng) {
  Mat M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = gaussian(rng);
  return M;
}

double exact_norm(const Mat& A, const NormedSpace& dom, const NormedSpace& cod) {
  OperatorNormOptions o;
  o.require_exact = true;
  return operator_norm(A, dom, cod, o).value;
}

WitnessSuiteRow shift_row(int trials, std::uint64_t seed, bool broken) {
  constexpr double eps = 0.05;
  WitnessSuiteRow row{"shift", trials, trials, kInf, "2-5eps=" + csv_number(2.0 - 5.0 * eps), true, ""};
  std::vector<double> worst(static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t f) {
    auto rng = stream(seed, f);
    const bool sup = f % 2 == 1;
    const NormedSpace X = NormedSpace::lp(sup ? kInf : 1.0, 2);
    Mat psi = Mat::Identity(2, 2);
    if (sup) psi << 0.5, 0.5, 0.5, -0.5;
    const int count = 1 + static_cast<int>(f % 3), m = 4 + static_cast<int>(f % 9);
    const NormedSpace cod = NormedSpace::lp(1, m);
    std::vector<Mat> T;
    for (int i = 0; i < count; ++i) {
      const Mat A = gaussian_matrix(m, 2, rng);
      T.push_back(A / exact_norm(A, X, cod));
    }
    const auto w = shift_witness(T, X, psi, eps);
    const Mat S = broken ? Mat(-w.padded[0]) : w.S;
    const NormedSpace out = NormedSpace::lp(1, w.spec.output_dim);
    double v = kInf;
    for (const auto& P : w.padded) v = std::min(v, exact_norm(P + S, X, out));
    worst[f] = v;
  });
  for (double v : worst) row.min_value = std::min(row.min_value, v);
  row.passed = row.min_value >= 2.0 - 5.0 * eps - 1e-9;
  return row;
}

WitnessSuiteRow interval_row(int trials, std::uint64_t seed, bool broken) {
  constexpr double eps = 0.1;
  constexpr int N = 16;
  WitnessSuiteRow row{"interval", trials, trials, kInf, "2-2eps=" + csv_number(2.0 - 2.0 * eps), true, ""};
  const NormedSpace X = NormedSpace::lp(1, 2), L = NormedSpace::discretized_l1(N);
  Mat T0 = Mat::Zero(N, 2);
  T0.block(0, 0, N / 2, 1).setConstant(2.0);
  T0.block(N / 2, 1, N / 2, 1).setConstant(2.0);
  std::vector<double> worst(static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t f) {
    auto rng = stream(seed, f);
    const int count = 1 + static_cast<int>(f % 3);
    std::vector<Mat> T;
    for (int i = 0; i < count; ++i) {
      // Mass on the first half of [0,1] with a small leak into the second.
      Mat A = gaussian_matrix(N, 2, rng);
      Mat H = A;
      H.bottomRows(N / 2).setZero();
      Mat Tl = A;
      Tl.topRows(N / 2).setZero();
      const double hn = exact_norm(H, X, L), tn = exact_norm(Tl, X, L);
      const Mat B = H / hn + (eps / 4.0) * uniform01(rng) * Tl / tn;
      T.push_back(B / exact_norm(B, X, L));
    }
    const auto w = interval_witness(T, X, T0, eps);
    const Mat G = broken ? Mat(-T[0]) : w.G;
    double v = kInf;
    for (const auto& A : T) v = std::min(v, exact_norm(A + G, X, L));
    worst[f] = v;
  });
  for (double v : worst) row.min_value = std::min(row.min_value, v);
  row.passed = row.min_value >= 2.0 - 2.0 * eps - 1e-9;
  return row;
}

WitnessSuiteRow rank_one_row(int trials, std::uint64_t seed, bool broken) {
  const RankOneConfig rc;
  WitnessSuiteRow row{"rankone", trials, 0, kInf, "2-5eps=" + csv_number(2.0 - 5.0 * rc.epsilon), true, ""};
  const NormedSpace X = NormedSpace::lp(kInf, 4), Y = NormedSpace::lp(1, 4);
  std::vector<double> worst(static_cast<std::size_t>(trials));
  std::vector<char> covered(static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t f) {
    auto rng = stream(seed, f);
    std::vector<Tensor> fam;
    for (int i = 0; i < 3; ++i) {
      const Mat C = gaussian_matrix(4, 4, rng);
      fam.emplace_back(X, Y, C / injective_value(Tensor(X, Y, C)));
    }
    const auto w = rank_one_witness_search(fam, rc);
    const Mat S = broken ? Mat(-fam[0].coeffs) : w.S.coeffs;
    double v = kInf;
    for (const auto& t : fam) v = std::min(v, injective_value(Tensor(X, Y, t.coeffs + S)));
    worst[f] = v;
    covered[f] = w.applicable;
  });
  // Finite lp(inf, d) is only approximately alternatively octahedral, so
  // the bound is checked on the instances where both stages succeed.
  for (std::size_t f = 0; f < worst.size(); ++f) {
    if (!covered[f]) continue;
    ++row.applicable;
    row.min_value = std::min(row.min_value, worst[f]);
  }
  row.passed = row.min_value >= 2.0 - 5.0 * rc.epsilon - 1e-9;
  return row;
}

WitnessSuiteRow sup_alt_row(int trials, std::uint64_t seed, bool broken) {
  WitnessSuiteRow row{"supalt", trials, trials, kInf, "2", true, ""};
  const NormedSpace X = NormedSpace::lp(kInf, 6);
  for (int f = 0; f < trials; ++f) {
    auto rng = stream(seed, static_cast<std::uint64_t>(f));
    std::vector<Vec> fam;
    for (int i = 0; i < 4; ++i) fam.push_back(X.random_unit(rng));
    Vec y = sup_alt_witness(X, fam).y;
    if (broken) {
      Eigen::Index j = 0;
      fam[0].cwiseAbs().minCoeff(&j);
      y = Vec::Unit(6, j);
    }
    for (const auto& x : fam) row.min_value = std::min(row.min_value, std::max(X.norm(x + y), X.norm(x - y)));
  }
  row.passed = row.min_value >= 2.0 - 1e-9;
  return row;
}

WitnessSuiteRow oplus1_row(int trials, std::uint64_t seed, double tolerance, bool broken) {
  WitnessSuiteRow row{"oplus1", trials, trials, 0.0, "additivity<=" + csv_number(tolerance), true, ""};
  const std::vector<NormedSpace> Ys{NormedSpace::lp(2, 2), NormedSpace::lp(1, 3), NormedSpace::lp(kInf, 3),
                                    NormedSpace::lp(3, 2)};
  std::vector<double> err(static_cast<std::size_t>(trials));
  std::vector<char> exact(static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t f) {
    auto rng = stream(seed, f);
    const NormedSpace& Y = Ys[f % Ys.size()];
    const int m = 1 + static_cast<int>((f / Ys.size()) % 3);
    const NormedSpace X = NormedSpace::lp(1, m);
    const Mat C = gaussian_matrix(m, Y.dim(), rng);
    const Tensor z(X, Y, C / projective_norm(Tensor(X, Y, C)).value);
    const Vec y = Y.random_unit(rng);
    const auto e = oplus1_extension(z, y);
    double norm_zv = e.norm_zv;
    if (broken) {
      Mat W = e.z_ext.coeffs;
      W.row(0) += y.transpose();
      norm_zv = projective_norm(Tensor(e.z_ext.X, Y, W)).value;
    }
    err[f] = std::abs(norm_zv - (e.norm_z + 1.0));
    exact[f] = e.exactness == Exactness::Exact;
  });
  for (std::size_t f = 0; f < err.size(); ++f) {
    row.min_value = std::max(row.min_value, err[f]);
    if (!exact[f]) row.passed = false;
  }
  row.passed = row.passed && row.min_value <= tolerance;
  return row;
}

}  // namespace

std::vector<WitnessSuiteRow> witness_suite(int trials, std::uint64_t seed, double tolerance, bool break_witness) {
  const std::vector<std::function<WitnessSuiteRow(std::uint64_t)>> kinds{
      [&](std::uint64_t s) { return shift_row(trials, s, break_witness); },
      [&](std::uint64_t s) { return interval_row(trials, s, break_witness); },
      [&](std::uint64_t s) { return rank_one_row(trials, s, break_witness); },
      [&](std::uint64_t s) { return sup_alt_row(trials, s, break_witness); },
      [&](std::uint64_t s) { return oplus1_row(trials, s, tolerance, break_witness); },
  };
  static const char* names[] = {"shift", "interval", "rankone", "supalt", "oplus1"};
  std::vector<WitnessSuiteRow> rows;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    try {
      rows.push_back(kinds[i](mix64(seed + i)));
    } catch (const std::exception& e) {
      WitnessSuiteRow r;
      r.kind = names[i];
      r.instances = trials;
      r.error = e.what();
      rows.push_back(r);
    }
  }
  return rows;
}

// -------------------------------------------------------------- experiments

namespace {

struct Block {
  std::vector<std::string> rows;
  int errors = 0;
  int failed = 0;
};

std::string join(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
  return s;
}

std::string error_cell(const std::exception& e) { return "ERROR " + csv_text(e.what()); }

bool in_open_12(double p) { return p > 1.0 && p < 2.0; }

Block dichotomy_block(const ExperimentConfig& cfg, double p, int n) {
  Block b;
  std::vector<int> ms = cfg.m;
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  auto row = [&](int m, const std::string& defect, const std::string& cap, const std::string& kind,
                 const std::string& status) {
    return join({csv_number(p), std::to_string(n), std::to_string(m), std::to_string(cfg.k), defect, cap, kind,
                 status});
  };
  try {
    DichotomyConfig dc;
    dc.seed = cfg.seed;
    dc.families = cfg.families;
    dc.defect.starts = cfg.starts;
    dc.defect.grid = cfg.grid;
    dc.defect.seed = cfg.seed;
    std::optional<double> cap;
    int k = cfg.k;
    if (in_open_12(p)) {
      NonOctaConfig nc;
      nc.search_budget = cfg.budget;
      nc.seed = cfg.seed;
      try {
        const auto cert = non_octa_certificate(p, n, ms.front(), nc);
        std::vector<Mat> fam;
        for (const auto& t : cert.family) fam.push_back(t.coeffs);
        dc.family = std::move(fam);
        dc.defect.starts = 0;
        dc.defect.ascend_pool = false;
        cap = 2.0 - cert.delta0;
        k = static_cast<int>(cert.family.size());
      } catch (const Error&) {
        // No obstruction within budget: scan seeded families, cap unknown.
      }
    }
    const auto rows = dichotomy_scan(p, n, ms, k, dc);
    for (const auto& r : rows) {
      std::string status = "ok";
      if (cap && r.max_defect > *cap + cfg.tolerance) {
        status = "FAIL defect above certified cap";
        ++b.failed;
      }
      b.rows.push_back(row(r.m, csv_number(r.max_defect), cap ? csv_number(*cap) : "NA", r.source, status));
    }
  } catch (const std::exception& e) {
    for (int m : ms) b.rows.push_back(row(m, "NA", "NA", "NA", error_cell(e)));
    ++b.errors;
  }
  return b;
}

Block certify_block(const ExperimentConfig& cfg, double p, int n, int m) {
  Block b;
  try {
    NonOctaConfig nc;
    nc.search_budget = cfg.budget;
    nc.seed = cfg.seed;
    const auto c = non_octa_certificate(p, n, m, nc);
    const bool chain = parameter_chain_holds(c);
    if (!chain) ++b.failed;
    b.rows.push_back(join({csv_number(p), std::to_string(n), std::to_string(m), csv_number(c.nu), csv_number(c.eta),
                           csv_number(c.delta0), csv_number(c.eps0), chain ? "certified" : "FAIL parameter chain"}));
  } catch (const std::exception& e) {
    b.rows.push_back(join({csv_number(p), std::to_string(n), std::to_string(m), "NA", "NA", "NA", "NA", error_cell(e)}));
    ++b.errors;
  }
  return b;
}

Block cutcone_block(const ExperimentConfig& cfg, double p, int n) {
  Block b;
  const NormedSpace X = NormedSpace::lp(p, n);
  try {
    const auto s = point_config_search(X, cfg.points, cfg.budget, cfg.seed);
    const auto cert = cut_cone_membership(distance_matrix(X, s.points));
    const bool verified = verify_certificate(cert);
    if (!verified) ++b.failed;
    const std::string q = cert.negative_type ? csv_number(cert.negative_type_value) : "NA";
    b.rows.push_back(join({X.to_string(), std::to_string(cfg.points), std::to_string(cfg.budget),
                           csv_number(s.distortion), s.label(), cert.feasible ? "feasible" : "infeasible", q,
                           verified ? "verified" : "FAIL certificate"}));
  } catch (const std::exception& e) {
    b.rows.push_back(join({X.to_string(), std::to_string(cfg.points), std::to_string(cfg.budget), "NA", "NA", "NA",
                           "NA", error_cell(e)}));
    ++b.errors;
  }
  return b;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  require(!cfg.experiment.empty(), "missing experiment");
  std::string columns;
  std::vector<std::function<Block()>> tasks;
  if (cfg.experiment == "dichotomy") {
    columns = "p,n,m,k,defect_estimate,certified_cap,witness_kind,status";
    for (double p : cfg.p)
      for (int n : cfg.n) tasks.push_back([&cfg, p, n] { return dichotomy_block(cfg, p, n); });
  } else if (cfg.experiment == "certify") {
    columns = "p,n,m,nu,eta,delta0,eps0,outcome";
    for (double p : cfg.p)
      for (int n : cfg.n)
        for (int m : cfg.m) tasks.push_back([&cfg, p, n, m] { return certify_block(cfg, p, n, m); });
  } else if (cfg.experiment == "cutcone-scan") {
    columns = "space,points,budget,distortion,search_outcome,membership,negative_type_q,status";
    for (double p : cfg.p)
      for (int n : cfg.n) tasks.push_back([&cfg, p, n] { return cutcone_block(cfg, p, n); });
  } else {
    columns = "kind,instances,applicable,value,bound,status";
    tasks.push_back([&cfg] {
      Block b;
      for (const auto& r : witness_suite(cfg.trials, cfg.seed, cfg.tolerance, cfg.break_witness)) {
        std::string status = r.passed ? "PASS" : "FAIL";
        if (!r.error.empty()) {
          status = "ERROR " + csv_text(r.error);
          ++b.errors;
        } else if (!r.passed) {
          ++b.failed;
        }
        const bool has_value = r.error.empty() && r.applicable > 0;
        b.rows.push_back(join({r.kind, std::to_string(r.instances), std::to_string(r.applicable),
                               has_value ? csv_number(r.min_value) : "NA", r.bound, status}));
      }
      return b;
    });
  }

  std::vector<Block> blocks(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t i) { blocks[i] = tasks[i](); });

  ExperimentResult out;
  out.csv = std::string("# ") + kCsvVersion + " experiment=" + cfg.experiment + " seed=" + std::to_string(cfg.seed) +
            "\n" + columns + "\n";
  for (const auto& b : blocks) {
    for (const auto& r : b.rows) out.csv += r + "\n";
    out.rows += static_cast<int>(b.rows.size());
    out.errors += b.errors;
    out.failed_verifiers += b.failed;
  }
  return out;
}

}  // namespace octa
