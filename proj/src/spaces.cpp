#include "octa/spaces.hpp"

#include "octa/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

namespace octa {

namespace {

double parse_double(std::string_view s) {
  std::string buf(s);
  if (buf == "inf" || buf == "Inf" || buf == "INF") return kInf;
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  require(end != buf.c_str() && *end == '\0', "malformed number '" + buf + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Scaled p-norm, safe for large p.
double lp_norm(const Vec& x, double p) {
  const double big = x.cwiseAbs().maxCoeff();
  if (big == 0.0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]) / big, p);
  return big * std::pow(s, 1.0 / p);
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

double conjugate_exponent(double p) {
  require(p >= 1.0, "exponent must lie in [1, inf]");
  if (p == 1.0) return kInf;
  if (p == kInf) return 1.0;
  return p / (p - 1.0);
}

NormedSpace NormedSpace::lp(double p, int n) {
  require(!std::isnan(p) && p >= 1.0, "p outside [1, inf]");
  require(n >= 1, "dimension must be positive");
  return NormedSpace(Kind::Lp, n, p, {});
}

NormedSpace NormedSpace::weighted_l1(std::vector<double> weights) {
  require(!weights.empty(), "weighted-l1 needs at least one weight");
  for (double w : weights) require(w > 0.0 && std::isfinite(w), "weights must be positive");
  const int n = static_cast<int>(weights.size());
  return NormedSpace(Kind::WeightedL1, n, 1.0, std::move(weights));
}

NormedSpace NormedSpace::weighted_linf(std::vector<double> weights) {
  require(!weights.empty(), "weighted-linf needs at least one weight");
  for (double w : weights) require(w > 0.0 && std::isfinite(w), "weights must be positive");
  const int n = static_cast<int>(weights.size());
  return NormedSpace(Kind::WeightedLinf, n, kInf, std::move(weights));
}

NormedSpace NormedSpace::discretized_l1(int cells) {
  require(cells >= 1, "grid needs at least one cell");
  return weighted_l1(std::vector<double>(static_cast<std::size_t>(cells), 1.0 / cells));
}

NormedSpace NormedSpace::parse(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() == 3 && parts[0] == "lp") {
    const double p = parse_double(parts[1]);
    const double n = parse_double(parts[2]);
    require(n >= 1 && n == std::floor(n), "lp dimension must be a positive integer");
    return lp(p, static_cast<int>(n));
  }
  if (parts.size() == 2 && (parts[0] == "wl1" || parts[0] == "wlinf")) {
    std::vector<double> w;
    for (auto tok : split(parts[1], ',')) w.push_back(parse_double(tok));
    return parts[0] == "wl1" ? weighted_l1(std::move(w)) : weighted_linf(std::move(w));
  }
  throw Error("unrecognized space '" + std::string(text) + "' (expected lp:<p>:<n> or wl1:<w1,...>)");
}

NormedSpace NormedSpace::dual() const {
  switch (kind_) {
    case Kind::Lp:
      return lp(conjugate_exponent(p_), dim_);
    case Kind::WeightedL1:
      return weighted_linf(weights_);
    case Kind::WeightedLinf:
      return weighted_l1(weights_);
  }
  throw Error("unreachable");
}

void NormedSpace::check_dim(const Vec& x) const {
  if (x.size() != dim_)
    throw Error("dimension mismatch: vector of length " + std::to_string(x.size()) + " in space " + to_string());
}

double NormedSpace::norm(const Vec& x) const {
  check_dim(x);
  if (kind_ == Kind::WeightedL1) {
    double s = 0.0;
    for (int c = 0; c < dim_; ++c) s += weights_[static_cast<std::size_t>(c)] * std::abs(x[c]);
    return s;
  }
  if (kind_ == Kind::WeightedLinf) {
    double m = 0.0;
    for (int c = 0; c < dim_; ++c) m = std::max(m, std::abs(x[c]) / weights_[static_cast<std::size_t>(c)]);
    return m;
  }
  if (p_ == 1.0) return x.lpNorm<1>();
  if (p_ == kInf) return x.lpNorm<Eigen::Infinity>();
  if (p_ == 2.0) return x.norm();
  return lp_norm(x, p_);
}

Vec NormedSpace::norming_functional(const Vec& x) const {
  const double nx = norm(x);
  require(std::abs(nx - 1.0) <= 1e-9, "norming_functional needs a unit vector (norm " + format_number(nx) + ")");
  Vec f = Vec::Zero(dim_);
  if (is_l1_type()) {
    for (int c = 0; c < dim_; ++c) f[c] = weight(c) * (x[c] < 0.0 ? -1.0 : 1.0);
    return f;
  }
  if (is_linf_type()) {
    int best = 0;
    double best_val = -1.0;
    for (int c = 0; c < dim_; ++c) {
      const double v = std::abs(x[c]) / weight(c);
      if (v > best_val) {
        best_val = v;
        best = c;
      }
    }
    f[best] = (x[best] < 0.0 ? -1.0 : 1.0) / weight(best);
    return f;
  }
  for (int c = 0; c < dim_; ++c) {
    const double a = std::abs(x[c]);
    f[c] = (x[c] < 0.0 ? -1.0 : 1.0) * (a == 0.0 ? 0.0 : std::pow(a, p_ - 1.0));
  }
  return f;
}

Vec NormedSpace::unit_basis(int c) const {
  require(c >= 0 && c < dim_, "basis index out of range");
  Vec e = Vec::Zero(dim_);
  e[c] = 1.0;
  return e / norm(e);
}

Vec NormedSpace::random_unit(std::mt19937_64& rng) const {
  Vec g(dim_);
  double n = 0.0;
  do {
    for (int c = 0; c < dim_; ++c) g[c] = gaussian(rng);
    n = norm(g);
  } while (n == 0.0);
  return g / n;
}

std::string NormedSpace::to_string() const {
  if (kind_ == Kind::Lp) {
    return "lp:" + (p_ == kInf ? std::string("inf") : format_number(p_)) + ":" + std::to_string(dim_);
  }
  std::string out = kind_ == Kind::WeightedL1 ? "wl1:" : "wlinf:";
  for (std::size_t c = 0; c < weights_.size(); ++c) {
    if (c) out += ",";
    out += format_number(weights_[c]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Modulus of uniform convexity.
//
// Writing f = m + (eps/2) h, g = m - (eps/2) h with ||h|| = 1 gives
// delta(eps) = 1 - sup ||m|| over m with ||m +- (eps/2) h|| <= 1. For a fixed
// pair of unit directions (e, h) the admissible radii r (m = r e) form an
// interval [0, r*] with r* <= 1, found by bisection. Any sampled pair yields
// 1 - r* >= delta(eps).

namespace {

double admissible_radius(const NormedSpace& s, const Vec& e, const Vec& h, double eps) {
  const Vec c = 0.5 * eps * h;
  auto fits = [&](double r) { return std::max(s.norm(r * e + c), s.norm(r * e - c)) <= 1.0 + 1e-15; };
  if (fits(1.0)) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fits(mid) ? lo : hi) = mid;
  }
  return lo;
}

struct DirectionPair {
  Vec e, h;
};

std::vector<DirectionPair> modulus_candidates(const NormedSpace& s, int budget, std::uint64_t seed) {
  const int n = s.dim();
  std::vector<Vec> structured;
  for (int i = 0; i < n; ++i) {
    Vec v = Vec::Zero(n);
    v[i] = 1.0;
    structured.push_back(v / s.norm(v));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (double sg : {1.0, -1.0}) {
        Vec v = Vec::Zero(n);
        v[i] = 1.0;
        v[j] = sg;
        structured.push_back(v / s.norm(v));
      }
    }
  }
  std::vector<DirectionPair> out;
  for (const auto& e : structured)
    for (const auto& h : structured) out.push_back({e, h});

  if (n == 2) {
    // Boundary grid over the angle pair.
    const int g = std::clamp(static_cast<int>(std::sqrt(static_cast<double>(budget))), 8, 256);
    for (int a = 0; a < g; ++a) {
      for (int b = 0; b < g; ++b) {
        const double ta = 3.141592653589793 * a / g;
        const double tb = 3.141592653589793 * b / g;
        Vec e(2), h(2);
        e << std::cos(ta), std::sin(ta);
        h << std::cos(tb), std::sin(tb);
        out.push_back({e / s.norm(e), h / s.norm(h)});
      }
    }
  }
  auto rng = stream(seed, 0x6d6f64);
  for (int k = 0; k < budget; ++k) {
    Vec e = s.random_unit(rng);
    Vec h = s.random_unit(rng);
    out.push_back({std::move(e), std::move(h)});
  }
  return out;
}

// Hill-climbing polish of the best pairs.
double refine_pair(const NormedSpace& s, DirectionPair pair, double eps, double radius, std::uint64_t seed) {
  auto rng = stream(seed, 0x726566);
  double step = 0.1;
  for (int it = 0; it < 400 && step > 1e-7; ++it) {
    DirectionPair trial = pair;
    for (int c = 0; c < s.dim(); ++c) {
      trial.e[c] += step * gaussian(rng);
      trial.h[c] += step * gaussian(rng);
    }
    trial.e /= s.norm(trial.e);
    trial.h /= s.norm(trial.h);
    const double r = admissible_radius(s, trial.e, trial.h, eps);
    if (r > radius) {
      radius = r;
      pair = std::move(trial);
    } else if (it % 20 == 19) {
      step *= 0.5;
    }
  }
  return radius;
}

}  // namespace

std::vector<ConvexityModulusEstimate> uniform_convexity_profile(const NormedSpace& space,
                                                                const std::vector<double>& epsilons, int budget,
                                                                std::uint64_t seed) {
  require(budget > 0, "modulus budget must be positive");
  for (double eps : epsilons) require(eps > 0.0 && eps <= 2.0, "epsilon must lie in (0, 2]");
  require(std::is_sorted(epsilons.begin(), epsilons.end()), "epsilon grid must be ascending");

  std::vector<ConvexityModulusEstimate> out(epsilons.size());
  if (space.is_hilbert()) {
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
      const double e = epsilons[i];
      out[i] = {e, 1.0 - std::sqrt(1.0 - 0.25 * e * e), ModulusMethod::ClosedFormHilbert, budget};
    }
    return out;
  }

  const auto candidates = modulus_candidates(space, budget, seed);
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    const double eps = epsilons[i];
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c)
      scored.emplace_back(admissible_radius(space, candidates[c].e, candidates[c].h, eps), c);
    const std::size_t keep = std::min<std::size_t>(4, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
    double best = scored.front().first;
    if (best < 1.0) {
      for (std::size_t k = 0; k < keep; ++k)
        best = std::max(best, refine_pair(space, candidates[scored[k].second], eps, scored[k].first, seed + k));
    }
    out[i] = {eps, std::clamp(1.0 - best, 0.0, 1.0), ModulusMethod::Optimization, budget};
  }
  // delta is nondecreasing, so an upper estimate at a larger epsilon bounds
  // every smaller one.
  for (std::size_t i = out.size(); i-- > 1;)
    out[i - 1].delta_hat = std::min(out[i - 1].delta_hat, out[i].delta_hat);
  return out;
}

ConvexityModulusEstimate uniform_convexity_modulus(const NormedSpace& space, double epsilon, int budget,
                                                   std::uint64_t seed) {
  require(epsilon > 0.0 && epsilon <= 2.0, "epsilon must lie in (0, 2]");
  return uniform_convexity_profile(space, {epsilon}, budget, seed).front();
}

// ---------------------------------------------------------------------------

namespace {

// c with ||v|| >= c ||v||_inf for every v.
double sup_norm_constant(const NormedSpace& space) {
  double c = kInf;
  for (int i = 0; i < space.dim(); ++i) {
    const double w = space.weight(i);
    c = std::min(c, space.kind() == NormedSpace::Kind::WeightedLinf ? 1.0 / w : w);
  }
  return space.kind() == NormedSpace::Kind::Lp ? 1.0 : c;
}

struct CellHash {
  std::size_t operator()(const std::vector<long>& key) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (long v : key) h = mix64(h ^ static_cast<std::uint64_t>(v));
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

SphereNet sphere_net(const NormedSpace& space, double nu, int budget, std::uint64_t seed,
                     const std::vector<Vec>& seeds) {
  require(nu > 0.0, "net radius must be positive");
  require(budget > 0, "net budget must be positive");
  require(space.dim() <= kNetDimensionLimit, "net dimension limit");
  SphereNet net{space, nu, {}};
  // Points within nu in the norm are within nu / c in the sup norm, so a
  // query only has to look at the 3^dim neighbouring cells of side nu / c.
  const double cell = nu / sup_norm_constant(space);
  std::unordered_map<std::vector<long>, std::vector<std::size_t>, CellHash> grid;
  auto cell_of = [&](const Vec& v) {
    std::vector<long> key(static_cast<std::size_t>(v.size()));
    for (Eigen::Index c = 0; c < v.size(); ++c) key[static_cast<std::size_t>(c)] = std::lround(std::floor(v[c] / cell));
    return key;
  };
  auto far_from_net = [&](const Vec& v, double radius) {
    const auto base = cell_of(v);
    const int dim = space.dim();
    std::vector<long> key(base.size());
    for (long code = 0, total = std::lround(std::pow(3.0, dim)); code < total; ++code) {
      long rest = code;
      for (int c = 0; c < dim; ++c, rest /= 3) key[static_cast<std::size_t>(c)] = base[static_cast<std::size_t>(c)] + rest % 3 - 1;
      const auto it = grid.find(key);
      if (it == grid.end()) continue;
      for (auto q : it->second)
        if (space.norm(v - net.points[q]) <= radius) return false;
    }
    return true;
  };
  auto add = [&](Vec v) {
    grid[cell_of(v)].push_back(net.points.size());
    net.points.push_back(std::move(v));
  };
  for (const auto& s : seeds) {
    const double n = space.norm(s);
    require(n > 0.0, "net seed must be nonzero");
    Vec u = s / n;
    if (far_from_net(u, nu)) add(std::move(u));
  }
  if (Vec e1 = space.unit_basis(0); far_from_net(e1, nu)) add(std::move(e1));

  auto rng = stream(seed, 0x6e6574);
  int misses = 0;
  while (misses < budget) {
    Vec v = space.random_unit(rng);
    if (far_from_net(v, nu)) {
      add(std::move(v));
      misses = 0;
    } else {
      ++misses;
    }
  }
  // Repair pass: samples from an independent stream that are not within
  // 0.95 nu become net points, until a full round is covered. Norms of
  // differences of unit vectors never exceed 2, so nu >= 2 needs no repair.
  const double repair_radius = 0.95 * nu;
  for (std::uint64_t round = 0; nu < 2.0; ++round) {
    auto check = stream(seed, 0x72657061ULL + round);
    bool added = false;
    for (int k = 0; k < kNetRepairSamples; ++k) {
      Vec v = space.random_unit(check);
      if (far_from_net(v, repair_radius)) {
        add(std::move(v));
        added = true;
      }
    }
    if (!added) break;
  }
  return net;
}

double net_covering_radius(const SphereNet& net, int samples, std::uint64_t seed) {
  auto rng = stream(seed, 0x636f76);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Vec v = net.space.random_unit(rng);
    double best = kInf;
    for (const auto& q : net.points) best = std::min(best, net.space.norm(v - q));
    worst = std::max(worst, best);
  }
  return worst;
}

Vec parse_vector(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::vector<double> vals;
  std::string tok;
  while (in >> tok) vals.push_back(parse_double(tok));
  Vec v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

std::string format_vector(const Vec& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_number(v[i]);
  }
  return out;
}

}  // namespace octa
