#include "octa/octahedral.hpp"

#include "octa/parallel.hpp"
#include "octa/random.hpp"
#include "octa/witnesses.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace octa {

std::string to_string(DefectMode mode) { return mode == DefectMode::Octa ? "octa" : "alt-octa"; }

double TensorSpace::norm(const Mat& coeffs) const {
  const Tensor t(X, Y, coeffs);
  return kind == TensorNormKind::Injective ? injective_value(t) : projective_norm(t).value;
}

Vec flatten(const Mat& coeffs) { return Eigen::Map<const Vec>(coeffs.data(), coeffs.size()); }

Mat unflatten(const Vec& v, int rows, int cols) {
  require(v.size() == static_cast<Eigen::Index>(rows) * cols, "flattened tensor has the wrong size");
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

Tensor DefectReport::witness_tensor() const {
  require(tensor.has_value(), "report is not over a tensor space");
  return Tensor(tensor->X, tensor->Y, unflatten(witness, tensor->X.dim(), tensor->Y.dim()));
}

namespace {

constexpr double kUnitTol = 1e-8;

// Ambient space on flat coordinates.
struct Ambient {
  int dim = 0;
  std::function<double(const Vec&)> norm;
  Vec step;  // 1 / ||e_c||
  std::function<Vec(std::mt19937_64&)> random_unit;
};

Ambient ambient(const NormedSpace& s) {
  Ambient a;
  a.dim = s.dim();
  a.norm = [s](const Vec& v) { return s.norm(v); };
  a.step = Vec(s.dim());
  for (int c = 0; c < s.dim(); ++c) a.step[c] = 1.0 / s.norm(Vec::Unit(s.dim(), c));
  a.random_unit = [s](std::mt19937_64& rng) { return s.random_unit(rng); };
  return a;
}

Ambient ambient(const TensorSpace& s) {
  Ambient a;
  const int r = s.X.dim(), c = s.Y.dim();
  a.dim = r * c;
  a.norm = [s, r, c](const Vec& v) { return s.norm(unflatten(v, r, c)); };
  a.step = Vec(a.dim);
  for (int i = 0; i < a.dim; ++i) a.step[i] = 1.0 / a.norm(Vec::Unit(a.dim, i));
  a.random_unit = [a](std::mt19937_64& rng) {
    Vec v(a.dim);
    for (int i = 0; i < a.dim; ++i) v[i] = gaussian(rng);
    return Vec(v / a.norm(v));
  };
  return a;
}

// Objective with early exit: stops as soon as the running minimum drops
// below `cutoff` (the caller then rejects the point). `hint` is the index of
// the last minimizer, tried first.
class Objective {
 public:
  Objective(const Ambient& a, const std::vector<Vec>& family, DefectMode mode) : a_(a), family_(family), mode_(mode) {}

  double operator()(const Vec& y, double cutoff, std::size_t& hint) const {
    double best = kInf;
    const std::size_t n = family_.size(), first = hint;
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t i = (first + t) % n;
      double v = a_.norm(family_[i] + y);
      if (mode_ == DefectMode::Alt && v < best) v = std::max(v, a_.norm(family_[i] - y));
      if (v < best) {
        best = v;
        if (t > 0) hint = i;
        if (best < cutoff) return best;
      }
    }
    return best;
  }

 private:
  const Ambient& a_;
  const std::vector<Vec>& family_;
  DefectMode mode_;
};

struct Point {
  Vec y;
  double value = -kInf;
  std::string source;
};

bool better(const Point& a, const Point& b) {
  if (a.value != b.value) return a.value > b.value;
  return std::lexicographical_compare(a.y.data(), a.y.data() + a.y.size(), b.y.data(), b.y.data() + b.y.size());
}

Point ascend(const Ambient& a, const Objective& f, Point p, const DefectConfig& cfg) {
  std::size_t hint = 0;
  p.value = f(p.y, -kInf, hint);
  double step = 0.25;
  for (int sweep = 0; sweep < cfg.max_sweeps && step >= cfg.grid; ++sweep) {
    bool improved = false;
    for (int c = 0; c < a.dim; ++c) {
      for (double sg : {1.0, -1.0}) {
        Vec y = p.y;
        y[c] += sg * step * a.step[c];
        const double n = a.norm(y);
        if (!(n > 0.0)) continue;
        y /= n;
        const double v = f(y, p.value, hint);
        if (v > p.value + 1e-15) {
          p.y = std::move(y);
          p.value = v;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return p;
}

DefectReport run(const Ambient& a, const std::vector<Vec>& family, DefectMode mode, const DefectConfig& cfg,
                 std::vector<WitnessCandidate> pool) {
  require(!family.empty(), "family must be nonempty");
  require(cfg.starts >= 0 && cfg.grid > 0.0 && cfg.max_sweeps >= 0, "invalid defect configuration");
  for (const auto& x : family) {
    require(x.size() == a.dim, "family member has the wrong dimension");
    require(std::abs(a.norm(x) - 1.0) <= kUnitTol, "family members must be unit vectors");
  }
  const Objective f(a, family, mode);

  // Signed canonical basis, then caller extras/witnesses (already in pool).
  for (int c = 0; c < a.dim; ++c) {
    for (double sg : {1.0, -1.0}) pool.push_back({sg * a.step[c] * Vec::Unit(a.dim, c), ""});
  }
  Point best;
  std::size_t hint = 0;
  int candidates = 0;
  for (const auto& cand : pool) {
    require(cand.y.size() == a.dim, "candidate witness has the wrong dimension");
    const double n = a.norm(cand.y);
    if (!(n > 0.0)) continue;
    Point p{cand.y / n, 0.0, cand.source};
    ++candidates;
    p.value = f(p.y, best.value, hint);
    if (better(p, best)) best = std::move(p);
  }

  std::vector<Point> starts;
  if (cfg.ascend_pool && best.value > -kInf) starts.push_back(best);
  for (int s = 0; s < cfg.starts; ++s) {
    auto rng = stream(cfg.seed, static_cast<std::uint64_t>(s));
    starts.push_back({a.random_unit(rng), 0.0, "generic"});
  }
  std::vector<Point> results(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) { results[i] = ascend(a, f, starts[i], cfg); });
  for (auto& r : results)
    if (better(r, best)) best = std::move(r);

  DefectReport out;
  out.mode = mode;
  out.family = family;
  out.witness = best.y;
  out.defect = best.value;
  out.source = best.source;
  out.provenance = {cfg.seed, cfg.starts, cfg.grid, candidates + cfg.starts};
  return out;
}

DefectReport vector_defect(const NormedSpace& space, const std::vector<Vec>& family, DefectMode mode,
                           const DefectConfig& cfg) {
  std::vector<WitnessCandidate> pool = cfg.extra;
  if (cfg.use_witnesses && space.kind() == NormedSpace::Kind::Lp && space.is_linf_type() && !family.empty()) {
    for (const auto& x : family) require(std::abs(space.norm(x) - 1.0) <= kUnitTol, "family members must be unit vectors");
    pool.push_back({sup_alt_witness(space, family).y, "sup-alt"});
  }
  auto report = run(ambient(space), family, mode, cfg, pool);
  if (report.source.empty()) report.source = "basis";
  return report;
}

DefectReport tensor_defect(const TensorSpace& space, const std::vector<Tensor>& family, DefectMode mode,
                           const DefectConfig& cfg) {
  std::vector<Vec> flat;
  for (const auto& t : family) {
    require(t.X == space.X && t.Y == space.Y, "family tensors must live in the given tensor space");
    flat.push_back(flatten(t.coeffs));
  }
  std::vector<WitnessCandidate> pool = cfg.extra;
  if (cfg.use_witnesses && space.kind == TensorNormKind::Injective && space.X.kind() == NormedSpace::Kind::Lp &&
      space.X.is_linf_type() && !family.empty() && family.size() <= 16) {
    const auto w = rank_one_witness_search(family);
    pool.push_back({flatten(w.S.coeffs), "rank-one"});
  }
  auto report = run(ambient(space), flat, mode, cfg, pool);
  if (report.source.empty()) report.source = "rank-one";  // signed basis tensors
  report.tensor = space;
  return report;
}

}  // namespace

double defect_objective(const NormedSpace& space, const std::vector<Vec>& family, const Vec& y, DefectMode mode) {
  const auto a = ambient(space);
  std::size_t hint = 0;
  return Objective(a, family, mode)(y, -kInf, hint);
}

double defect_objective(const TensorSpace& space, const std::vector<Tensor>& family, const Tensor& y,
                        DefectMode mode) {
  std::vector<Vec> flat;
  for (const auto& t : family) flat.push_back(flatten(t.coeffs));
  const auto a = ambient(space);
  std::size_t hint = 0;
  return Objective(a, flat, mode)(flatten(y.coeffs), -kInf, hint);
}

DefectReport family_defect(const NormedSpace& space, const std::vector<Vec>& family, const DefectConfig& cfg) {
  return vector_defect(space, family, DefectMode::Octa, cfg);
}

DefectReport alt_family_defect(const NormedSpace& space, const std::vector<Vec>& family, const DefectConfig& cfg) {
  return vector_defect(space, family, DefectMode::Alt, cfg);
}

DefectReport family_defect(const TensorSpace& space, const std::vector<Tensor>& family, const DefectConfig& cfg) {
  return tensor_defect(space, family, DefectMode::Octa, cfg);
}

DefectReport alt_family_defect(const TensorSpace& space, const std::vector<Tensor>& family,
                               const DefectConfig& cfg) {
  return tensor_defect(space, family, DefectMode::Alt, cfg);
}

DefectUpperBound defect_upper_bound_2d(const NormedSpace& space, const std::vector<Vec>& family, DefectMode mode,
                                       double resolution) {
  require(space.dim() == 2, "grid bound needs a 2-dimensional space");
  require(resolution > 0.0, "resolution must be positive");
  require(!family.empty(), "family must be nonempty");
  int K = std::max(16, static_cast<int>(std::ceil(8.0 / resolution)));
  std::vector<Vec> pts;
  double chord = kInf;
  while (true) {
    pts.clear();
    for (int j = 0; j < K; ++j) {
      const double t = 6.283185307179586 * j / K;
      Vec u(2);
      u << std::cos(t), std::sin(t);
      pts.push_back(u / space.norm(u));
    }
    chord = 0.0;
    for (int j = 0; j < K; ++j) chord = std::max(chord, space.norm(pts[static_cast<std::size_t>(j)] - pts[static_cast<std::size_t>((j + 1) % K)]));
    if (chord <= resolution) break;
    K *= 2;
  }
  DefectUpperBound out;
  out.points = K;
  out.max_chord = chord;
  out.grid_max = -kInf;
  const auto a = ambient(space);
  const Objective f(a, family, mode);
  std::size_t hint = 0;
  for (const auto& u : pts) out.grid_max = std::max(out.grid_max, f(u, -kInf, hint));
  out.upper = out.grid_max + chord;
  return out;
}

std::vector<Mat> seeded_tensor_family(double p, int n, int m, int k, std::uint64_t seed) {
  require(n >= 1 && m >= 1 && k >= 1, "family sizes must be positive");
  const NormedSpace X = NormedSpace::lp(1, m), Y = NormedSpace::lp(p, n);
  std::vector<Mat> out;
  for (int i = 0; i < k; ++i) {
    auto rng = stream(seed, static_cast<std::uint64_t>(i));
    Mat C(m, n);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < n; ++b) C(a, b) = gaussian(rng);
    out.push_back(C / injective_value(Tensor(X, Y, C)));
  }
  return out;
}

namespace {

// Shift candidate on the free coordinates m0..m-1 when lp(p*,n) embeds in L1.
std::optional<WitnessCandidate> shift_candidate(double p, int n, int m0, int m, const std::vector<Mat>& fam) {
  if (p < 2.0 || m - m0 < n) return std::nullopt;
  const NormedSpace Ystar = NormedSpace::lp(conjugate_exponent(p), n);
  Mat psi;
  double distortion = 1.0;
  if (p == kInf) {
    psi = Mat::Identity(n, n);
  } else {
    const auto fit = fit_l1_embedding(Ystar, default_directions(n, m - m0));
    psi = fit.psi;
    distortion = fit.distortion;
  }
  ShiftOptions opts;
  opts.k = m0;
  const double eps = std::max(0.01, distortion - 1.0);
  const auto w = shift_witness(fam, Ystar, psi, eps, opts);
  return WitnessCandidate{flatten(pad_rows(w.S, m)), "shift"};
}

}  // namespace

std::vector<DichotomyRow> dichotomy_scan(double p, int n, const std::vector<int>& m_list, int k,
                                         const DichotomyConfig& cfg) {
  require(n >= 2 && k >= 1, "need n >= 2 and k >= 1");
  require(!m_list.empty(), "m list must be nonempty");
  std::vector<int> ms = m_list;
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  require(ms.front() >= 1 && ms.back() <= kSignEnumerationLimit, "every m must lie in [1, 24]");
  const int m0 = ms.front();
  const NormedSpace Y = NormedSpace::lp(p, n);

  std::vector<std::vector<Mat>> families;
  if (cfg.family) {
    for (const auto& C : *cfg.family) require(C.rows() == m0 && C.cols() == n, "explicit family must be m0 x n");
    families.push_back(*cfg.family);
  } else {
    for (int f = 0; f < cfg.families; ++f)
      families.push_back(seeded_tensor_family(p, n, m0, k, mix64(cfg.seed + static_cast<std::uint64_t>(f))));
  }
  require(!families.empty(), "need at least one family");

  std::vector<std::vector<WitnessCandidate>> carried(families.size());
  std::vector<DichotomyRow> rows;
  for (int m : ms) {
    const NormedSpace X = NormedSpace::lp(1, m);
    const TensorSpace space{X, Y, TensorNormKind::Injective};
    DichotomyRow row;
    row.m = m;
    for (std::size_t f = 0; f < families.size(); ++f) {
      std::vector<Tensor> fam;
      for (const auto& C : families[f]) fam.emplace_back(X, Y, pad_rows(C, m));
      DefectConfig dc = cfg.defect;
      for (const auto& c : carried[f]) dc.extra.push_back({flatten(pad_rows(unflatten(c.y, static_cast<int>(c.y.size()) / n, n), m)), c.source});
      if (auto s = shift_candidate(p, n, m0, m, families[f])) dc.extra.push_back(*s);
      dc.seed = mix64(cfg.defect.seed ^ (static_cast<std::uint64_t>(m) << 20) ^ f);
      auto report = family_defect(space, fam, dc);
      if (report.source == "basis" || report.source == "sup-alt") report.source = "rank-one";
      carried[f] = {{report.witness, report.source}};
      row.reports.push_back(std::move(report));
    }
    double sum = 0.0;
    std::size_t arg = 0;
    for (std::size_t f = 0; f < row.reports.size(); ++f) {
      sum += row.reports[f].defect;
      if (row.reports[f].defect > row.reports[arg].defect) arg = f;
    }
    row.mean_defect = sum / static_cast<double>(row.reports.size());
    row.max_defect = row.reports[arg].defect;
    row.source = row.reports[arg].source;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace octa
