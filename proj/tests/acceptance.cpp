// Acceptance suite: one PASS/FAIL line per criterion.

#include "octa/embeddability.hpp"
#include "octa/experiments.hpp"
#include "octa/octahedral.hpp"
#include "octa/parallel.hpp"
#include "octa/random.hpp"
#include "octa/witnesses.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <sys/wait.h>

using namespace octa;

namespace {

Mat gaussian_matrix(int r, int c, std::mt19937_64& rng) {
  Mat M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = gaussian(rng);
  return M;
}

Vec gaussian_vector(int n, std::mt19937_64& rng) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = gaussian(rng);
  return v;
}

NormedSpace factor(int which, int dim) {
  static const double ps[] = {1.0, 2.0, kInf};
  return NormedSpace::lp(ps[which % 3], dim);
}

struct Outcome {
  bool passed = false;
  std::string detail;
};

// ---------------------------------------------------------------- 1
Outcome rank_one_norms() {
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    auto rng = stream(101, static_cast<std::uint64_t>(t));
    const auto X = factor(t, 1 + t % 4), Y = factor(t / 3, 1 + (t / 9) % 4);
    const Vec x = gaussian_vector(X.dim(), rng), y = gaussian_vector(Y.dim(), rng);
    const Tensor u = Tensor::rank_one(X, Y, x, y);
    const double expected = X.norm(x) * Y.norm(y);
    worst = std::max({worst, std::abs(injective_value(u) - expected), std::abs(projective_norm(u).value - expected)});
  }
  return {worst <= 1e-7, "max error " + csv_number(worst) + " over 1000 tensors"};
}

// ---------------------------------------------------------------- 2
Outcome ordering_and_duality() {
  double order = -kInf, duality = -kInf;
  for (int t = 0; t < 1000; ++t) {
    auto rng = stream(102, static_cast<std::uint64_t>(t));
    const auto X = factor(t, 1 + t % 3), Y = factor(t / 3, 1 + (t / 9) % 3);
    const Tensor u(X, Y, gaussian_matrix(X.dim(), Y.dim(), rng));
    const double pi = projective_norm(u).value;
    order = std::max(order, injective_value(u) - pi);
    // T : X -> Y*, as a dim Y x dim X matrix for operator_norm.
    const Mat T = gaussian_matrix(X.dim(), Y.dim(), rng);
    OperatorNormOptions o;
    o.require_exact = true;
    const double tn = operator_norm(T.transpose(), X, Y.dual(), o).value;
    duality = std::max(duality, std::abs(pairing(T, u)) - tn * pi);
  }
  return {order <= 1e-7 && duality <= 1e-6,
          "max(eps - pi) " + csv_number(order) + ", max(|<T,u>| - |T| |u|_pi) " + csv_number(duality)};
}

// ---------------------------------------------------------------- 3
Outcome l1_projective_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    auto rng = stream(103, static_cast<std::uint64_t>(t));
    const int m = 1 + t % 4, n = 1 + (t / 4) % 4;
    const Tensor u(NormedSpace::lp(1, m), NormedSpace::lp(1, n), gaussian_matrix(m, n, rng));
    worst = std::max(worst, std::abs(projective_norm(u).value - u.coeffs.cwiseAbs().sum()));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 1e-5 && secs < 30.0, "max error " + csv_number(worst) + " in " + csv_number(secs) + " s"};
}

// ---------------------------------------------------------------- 4
Outcome oplus1_additivity() {
  const std::vector<NormedSpace> Ys{NormedSpace::lp(2, 2), NormedSpace::lp(1, 3), NormedSpace::lp(kInf, 3),
                                    NormedSpace::lp(3, 2), NormedSpace::lp(2, 3)};
  double worst = 0.0;
  int bounds_only = 0;
  for (int t = 0; t < 100; ++t) {
    auto rng = stream(104, static_cast<std::uint64_t>(t));
    const auto& Y = Ys[static_cast<std::size_t>(t) % Ys.size()];
    const int m = 1 + (t / 5) % 3;
    const auto X = NormedSpace::lp(1, m);
    const Mat C = gaussian_matrix(m, Y.dim(), rng);
    const Tensor z(X, Y, C / projective_norm(Tensor(X, Y, C)).value);
    const auto e = oplus1_extension(z, Y.random_unit(rng));
    if (e.exactness != Exactness::Exact) ++bounds_only;
    worst = std::max(worst, std::abs(e.norm_zv - (e.norm_z + 1.0)));
  }
  return {worst <= 1e-5 && bounds_only == 0,
          "max |‖z+v‖ - ‖z‖ - 1| " + csv_number(worst) + ", bounds-only " + std::to_string(bounds_only)};
}

// ---------------------------------------------------------------- 5, 6
std::vector<WitnessSuiteRow> g_suite;

const WitnessSuiteRow& suite_row(const std::string& kind) {
  if (g_suite.empty()) g_suite = witness_suite(50, 105, 1e-5, false);
  for (const auto& r : g_suite)
    if (r.kind == kind) return r;
  throw Error("missing suite row " + kind);
}

Outcome shift_bound() {
  const auto& r = suite_row("shift");
  return {r.error.empty() && r.passed && r.min_value >= 1.75,
          "min over 50 families " + csv_number(r.min_value) + " (bound 1.75)"};
}

Outcome interval_bound() {
  const auto& r = suite_row("interval");
  return {r.error.empty() && r.passed && r.min_value >= 1.8,
          "min over 50 families on wl1(16) " + csv_number(r.min_value) + " (bound 1.8)"};
}

// ---------------------------------------------------------------- 7
std::string regression_path() { return std::string(OCTA_SOURCE_DIR) + "/tests/regression/dichotomy.csv"; }

bool csv_close(const std::string& a, const std::string& b, double tol) {
  std::istringstream sa(a), sb(b);
  std::string la, lb;
  while (true) {
    const bool ga = static_cast<bool>(std::getline(sa, la)), gb = static_cast<bool>(std::getline(sb, lb));
    if (ga != gb) return false;
    if (!ga) return true;
    std::istringstream ca(la), cb(lb);
    std::string x, y;
    while (true) {
      const bool gx = static_cast<bool>(std::getline(ca, x, ',')), gy = static_cast<bool>(std::getline(cb, y, ','));
      if (gx != gy) return false;
      if (!gx) break;
      if (x == y) continue;
      char* ex = nullptr;
      char* ey = nullptr;
      const double dx = std::strtod(x.c_str(), &ex), dy = std::strtod(y.c_str(), &ey);
      if (*ex || *ey || std::abs(dx - dy) > tol) return false;
    }
  }
}

Outcome dichotomy_positive() {
  ExperimentConfig cfg;
  cfg.experiment = "dichotomy";
  cfg.p = {1.0, 3.0, kInf};
  cfg.n = {3};
  cfg.m = {8, 16, 24};
  cfg.k = 3;
  cfg.seed = 7;
  const auto r = run_experiment(cfg);
  std::istringstream in(r.csv);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  bool ok = r.errors == 0 && rows.size() == 9;
  std::string detail;
  for (std::size_t i = 0; ok && i < rows.size(); ++i) {
    const double p = std::strtod(rows[i][0].c_str(), nullptr);
    const int m = std::stoi(rows[i][2]);
    const double d = std::strtod(rows[i][4].c_str(), nullptr);
    detail += (i % 3 == 0 ? (i ? "; p=" : "p=") + rows[i][0] + ":" : ",") + " " + rows[i][4];
    if (i % 3 > 0 && d < std::strtod(rows[i - 1][4].c_str(), nullptr) - 0.02) ok = false;
    if (p == 1.0 && d <= 2.0 - 2.0 * 3 / m - 0.02) ok = false;
  }
  std::ifstream frozen(regression_path(), std::ios::binary);
  if (frozen) {
    std::stringstream ss;
    ss << frozen.rdbuf();
    const bool same = csv_close(ss.str(), r.csv, 1e-6);
    ok = ok && same;
    detail += same ? " (matches frozen CSV)" : " (DIFFERS from frozen CSV)";
  } else {
    std::ofstream(regression_path(), std::ios::binary) << r.csv;
    detail += " (frozen CSV written)";
  }
  return {ok, detail};
}

// ---------------------------------------------------------------- 8
Outcome dichotomy_negative() {
  std::string detail;
  bool ok = true;
  for (double p : {4.0 / 3.0, 1.5}) {
    const double ps = conjugate_exponent(p);
    const auto X = NormedSpace::lp(ps, 3);
    const auto search = point_config_search(X, 8, 10000);
    detail += (detail.empty() ? "" : "; ") + X.to_string() + " search distortion " + csv_number(search.distortion);
    if (search.distortion <= 1.0 + 1e-9) {
      detail += " -> INCONCLUSIVE for p=" + csv_number(p) + " (no obstruction within budget 10^4)";
      continue;
    }
    NonOctaConfig nc;
    nc.search = search;
    const auto cert = non_octa_certificate(p, 3, 8, nc);
    const bool chain = parameter_chain_holds(cert);
    detail += " -> p=" + csv_number(p) + " delta0 " + csv_number(cert.delta0) + ", family " +
              std::to_string(cert.family.size());
    std::vector<Mat> fam;
    for (const auto& t : cert.family) fam.push_back(t.coeffs);
    DichotomyConfig dc;
    dc.family = std::move(fam);
    dc.defect.starts = 0;
    dc.defect.ascend_pool = false;
    const auto rows = dichotomy_scan(p, 3, {8, 16}, static_cast<int>(cert.family.size()), dc);
    for (const auto& r : rows) {
      detail += ", defect m=" + std::to_string(r.m) + " " + csv_number(r.max_defect);
      if (r.max_defect > 2.0 - cert.delta0 + 1e-6) ok = false;
    }
    ok = ok && chain && cert.delta0 > 0.0;
  }
  return {ok, detail};
}

// ---------------------------------------------------------------- 9
Outcome cut_cone() {
  int infeasible4 = 0, inconsistent = 0;
  auto check_consistency = [&](const Mat& D) {
    const bool member = cut_cone_membership(D).feasible;
    const double t = l1_distortion_bound(D);
    if (member != (std::abs(t - 1.0) <= 1e-7)) ++inconsistent;
  };
  for (int t = 0; t < 1000; ++t) {
    auto rng = stream(109, static_cast<std::uint64_t>(t));
    Mat D(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) D(i, j) = D(j, i) = i == j ? 0.0 : 0.1 + uniform01(rng);
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) D(i, j) = std::min(D(i, j), D(i, k) + D(k, j));
    const auto c = cut_cone_membership(D);
    if (!c.feasible || !verify_certificate(c)) ++infeasible4;
    check_consistency(D);
  }
  Mat K(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) K(i, j) = i == j ? 0.0 : ((i < 2) == (j < 2) ? 2.0 : 1.0);
  Vec b(5);
  b << 3, 3, -2, -2, -2;
  const double q = negative_type_form(K, b);
  const auto kc = cut_cone_membership(K);
  check_consistency(K);
  const bool ok = infeasible4 == 0 && inconsistent == 0 && q == 6.0 && !kc.feasible && verify_certificate(kc);
  return {ok, "4-point failures " + std::to_string(infeasible4) + ", K23 Q(b) = " + csv_number(q) +
                  ", K23 feasible " + (kc.feasible ? "yes" : "no") + ", inconsistencies " +
                  std::to_string(inconsistent)};
}

// ---------------------------------------------------------------- 10
Outcome sup_norm_example() {
  const auto X = NormedSpace::lp(kInf, 2);
  std::vector<Vec> fam{Vec::Unit(2, 0), -Vec::Unit(2, 0)};
  const double alt = alt_family_defect(X, fam).defect;
  const double octa = family_defect(X, fam).defect;
  const auto ub = defect_upper_bound_2d(X, fam, DefectMode::Octa, 1e-3);
  const bool ok = std::abs(alt - 2.0) <= 1e-9 && std::abs(octa - 1.0) <= 1e-2 && ub.upper <= 1.0 + 1e-2;
  return {ok, "alt " + csv_number(alt) + ", octa " + csv_number(octa) + ", certified upper " + csv_number(ub.upper)};
}

// ---------------------------------------------------------------- 11
std::string run_cli(const std::string& args, const std::string& out) {
  const std::string cmd = std::string(OCTA_CLI_PATH) + " " + args + " --out " + out + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return "<exit " + std::to_string(status) + ">";
  std::ifstream in(out, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const std::string dir = OCTA_BINARY_DIR;
  const std::string cfg = dir + "/acceptance_suite.cfg";
  std::ofstream(cfg) << "experiment = witness-suite\ntrials = 6\nseed = 3\n";
  const std::vector<std::string> commands{
      "run " + cfg,
      "dichotomy --p 3,inf --n 2 --m 4,6 --k 2 --families 1 --starts 2",
      "cutcone --space lp:4:3 --mode search --k 5 --budget 30",
  };
  int identical = 0;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    const std::string a = run_cli("--seed 5 " + commands[i], dir + "/acceptance_a.csv");
    const std::string b = run_cli("--seed 5 " + commands[i], dir + "/acceptance_b.csv");
    const std::string c = run_cli("--seed 5 --jobs 4 " + commands[i], dir + "/acceptance_c.csv");
    if (!a.empty() && a[0] == '#' && a == b && a == c) ++identical;
  }
  return {identical == static_cast<int>(commands.size()),
          std::to_string(identical) + "/" + std::to_string(commands.size()) +
              " commands byte-identical across reruns and --jobs 4"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"rank-one norms", rank_one_norms},
      {"norm ordering and duality", ordering_and_duality},
      {"l1 projective identity", l1_projective_identity},
      {"oplus1 additivity", oplus1_additivity},
      {"shift witness bound", shift_bound},
      {"interval witness bound", interval_bound},
      {"dichotomy positive side", dichotomy_positive},
      {"dichotomy negative side", dichotomy_negative},
      {"cut-cone correctness", cut_cone},
      {"sup-norm alternative example", sup_norm_example},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.passed) ++failed;
    std::printf("criterion %2zu: %s  %s: %s [%.1f s]\n", i + 1, o.passed ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
