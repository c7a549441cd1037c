#include "octa/embeddability.hpp"

#include "octa/lp.hpp"
#include "octa/parallel.hpp"
#include "octa/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace octa {

namespace {

constexpr double kPi = 3.141592653589793;

struct PairIndex {
  int k;
  std::vector<std::pair<int, int>> pairs;
  explicit PairIndex(int points) : k(points) {
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
  }
  int size() const { return static_cast<int>(pairs.size()); }
};

int cut_count(int k) { return (1 << (k - 1)) - 1; }

std::uint32_t cut_mask(int index) { return static_cast<std::uint32_t>(index + 1) << 1; }

// pairs x cuts incidence matrix.
Mat cut_matrix(const PairIndex& idx) {
  const int cuts = cut_count(idx.k);
  Mat A(idx.size(), cuts);
  for (int c = 0; c < cuts; ++c) {
    const auto mask = cut_mask(c);
    for (int p = 0; p < idx.size(); ++p) A(p, c) = cut_distance(mask, idx.pairs[static_cast<std::size_t>(p)].first, idx.pairs[static_cast<std::size_t>(p)].second);
  }
  return A;
}

Vec pair_vector(const Mat& D, const PairIndex& idx) {
  Vec d(idx.size());
  for (int p = 0; p < idx.size(); ++p) d[p] = D(idx.pairs[static_cast<std::size_t>(p)].first, idx.pairs[static_cast<std::size_t>(p)].second);
  return d;
}

void check_size(const Mat& D) {
  require(D.rows() == D.cols(), "distance matrix must be square");
  require(D.rows() >= 2, "need at least two points");
  require(D.rows() <= kCutConePointLimit,
          "cut cone supports at most " + std::to_string(kCutConePointLimit) + " points");
  validate_metric(D);
}

// Rounds the top eigenvector of the form restricted to {sum b = 0} to small
// integers, trying denominators 1..12 relative to the smallest entry.
std::optional<Eigen::VectorXi> round_negative_type(const Mat& D) {
  const Eigen::Index k = D.rows();
  const Mat P = Mat::Identity(k, k) - Mat::Constant(k, k, 1.0 / static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Mat> es(P * D * P);
  const Vec v = es.eigenvectors().col(k - 1);
  if (es.eigenvalues()[k - 1] <= 1e-12) return std::nullopt;
  double smallest = 0.0;
  for (Eigen::Index i = 0; i < k; ++i)
    if (std::abs(v[i]) > 1e-6 && (smallest == 0.0 || std::abs(v[i]) < smallest)) smallest = std::abs(v[i]);
  if (smallest == 0.0) return std::nullopt;
  for (int den = 1; den <= 12; ++den) {
    Eigen::VectorXi b(k);
    for (Eigen::Index i = 0; i < k; ++i) b[i] = static_cast<int>(std::lround(v[i] / smallest * den));
    if (b.sum() != 0 || b.isZero()) continue;
    int g = 0;
    for (Eigen::Index i = 0; i < k; ++i) g = std::gcd(g, std::abs(b[i]));
    if (g > 1) b /= g;
    if (negative_type_form(D, b.cast<double>()) > 0.0) return b;
  }
  return std::nullopt;
}

}  // namespace

double cut_distance(std::uint32_t mask, int i, int j) {
  return (((mask >> i) & 1u) != ((mask >> j) & 1u)) ? 1.0 : 0.0;
}

Mat distance_matrix(const NormedSpace& space, const std::vector<Vec>& points) {
  const auto k = static_cast<Eigen::Index>(points.size());
  Mat D = Mat::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i + 1; j < k; ++j)
      D(i, j) = D(j, i) = space.norm(points[static_cast<std::size_t>(i)] - points[static_cast<std::size_t>(j)]);
  return D;
}

void validate_metric(const Mat& D, double tol) {
  require(D.allFinite(), "distance matrix must be finite");
  const Eigen::Index k = D.rows();
  for (Eigen::Index i = 0; i < k; ++i) {
    require(std::abs(D(i, i)) <= tol, "distance matrix must have a zero diagonal");
    for (Eigen::Index j = 0; j < k; ++j) {
      require(std::abs(D(i, j) - D(j, i)) <= tol, "distance matrix must be symmetric");
      require(D(i, j) >= -tol, "distances must be nonnegative");
      for (Eigen::Index l = 0; l < k; ++l)
        require(D(i, j) <= D(i, l) + D(l, j) + tol, "distance matrix violates the triangle inequality");
    }
  }
}

double negative_type_form(const Mat& D, const Vec& b) {
  double q = 0.0;
  for (Eigen::Index i = 0; i < D.rows(); ++i)
    for (Eigen::Index j = i + 1; j < D.rows(); ++j) q += b[i] * b[j] * D(i, j);
  return q;
}

CutConeCertificate cut_cone_membership(const Mat& D) {
  check_size(D);
  const PairIndex idx(static_cast<int>(D.rows()));
  const Mat A = cut_matrix(idx);
  const Vec d = pair_vector(D, idx);
  CutConeCertificate cert;
  cert.D = D;
  // Minimum total weight picks a sparse, well-defined vertex.
  const auto r = lp::solve_standard(A, d, Vec::Ones(A.cols()));
  if (r.status == lp::Status::Optimal) {
    cert.feasible = true;
    for (Eigen::Index c = 0; c < A.cols(); ++c)
      if (r.x[c] > 1e-12) cert.cuts.push_back({cut_mask(static_cast<int>(c)), r.x[c]});
    return cert;
  }
  require(r.status == lp::Status::Infeasible, "cut cone LP failed: " + lp::to_string(r.status));
  cert.separator = Mat::Zero(D.rows(), D.cols());
  for (int p = 0; p < idx.size(); ++p) {
    const auto [i, j] = idx.pairs[static_cast<std::size_t>(p)];
    cert.separator(i, j) = cert.separator(j, i) = r.duals[p];
  }
  if (auto b = round_negative_type(D)) {
    cert.negative_type = *b;
    cert.negative_type_value = negative_type_form(D, b->cast<double>());
  }
  return cert;
}

bool verify_certificate(const CutConeCertificate& cert, double tol) {
  const int k = static_cast<int>(cert.D.rows());
  if (cert.feasible) {
    Mat R = Mat::Zero(k, k);
    for (const auto& c : cert.cuts) {
      if (c.weight < 0.0) return false;
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) R(i, j) += c.weight * cut_distance(c.mask, i, j);
    }
    return (R - cert.D).cwiseAbs().maxCoeff() <= tol;
  }
  double on_d = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) on_d += cert.separator(i, j) * cert.D(i, j);
  if (on_d <= 0.0) return false;
  for (int c = 0; c < cut_count(k); ++c) {
    double s = 0.0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) s += cert.separator(i, j) * cut_distance(cut_mask(c), i, j);
    if (s > tol) return false;
  }
  if (cert.negative_type) {
    if (cert.negative_type->sum() != 0) return false;
    if (negative_type_form(cert.D, cert.negative_type->cast<double>()) <= 0.0) return false;
  }
  return true;
}

double l1_distortion_bound(const Mat& D) {
  check_size(D);
  const PairIndex idx(static_cast<int>(D.rows()));
  const Mat C = cut_matrix(idx);
  const Vec d = pair_vector(D, idx);
  const int P = idx.size();
  const auto N = C.cols();
  // Variables: w (N), t, surplus (P), slack (P).
  //   C w - surplus = d
  //   C w - t d + slack = 0
  Mat A = Mat::Zero(2 * P, N + 1 + 2 * P);
  Vec b = Vec::Zero(2 * P);
  A.topLeftCorner(P, N) = C;
  A.block(0, N + 1, P, P) = -Mat::Identity(P, P);
  b.head(P) = d;
  A.bottomLeftCorner(P, N) = C;
  A.block(P, N, P, 1) = -d;
  A.block(P, N + 1 + P, P, P) = Mat::Identity(P, P);
  Vec cost = Vec::Zero(A.cols());
  cost[N] = 1.0;
  const auto r = lp::solve_standard(A, b, cost);
  require(r.status == lp::Status::Optimal, "distortion LP failed: " + lp::to_string(r.status));
  return std::max(1.0, r.value);
}

ConfigSearchResult point_config_search(const NormedSpace& space, int k, int budget, std::uint64_t seed) {
  require(budget > 0, "search budget must be positive");
  require(k >= 2 && k <= 8, "configuration size must lie in [2, 8]");
  require(space.dim() <= 4, "configuration search supports dimension <= 4");

  auto evaluate = [&](const std::vector<Vec>& pts) { return l1_distortion_bound(distance_matrix(space, pts)) - 1.0; };

  // Phase 1: independent random configurations, evaluated in parallel.
  const int random_budget = std::max(1, budget / 5);
  std::vector<double> scores(static_cast<std::size_t>(random_budget));
  std::vector<std::vector<Vec>> configs(static_cast<std::size_t>(random_budget));
  parallel_for(configs.size(), [&](std::size_t s) {
    auto rng = stream(seed, s);
    std::vector<Vec> pts;
    for (int i = 0; i < k; ++i) pts.push_back(space.random_unit(rng));
    scores[s] = evaluate(pts);
    configs[s] = std::move(pts);
  });
  std::size_t best_idx = 0;
  for (std::size_t s = 1; s < scores.size(); ++s)
    if (scores[s] > scores[best_idx]) best_idx = s;

  ConfigSearchResult out;
  out.points = configs[best_idx];
  double best = scores[best_idx];
  out.evaluations = random_budget;

  // Phase 2: local perturbation of one point at a time.
  auto rng = stream(seed, 0x6c6f63616cULL);
  double step = 0.3;
  int since_improvement = 0;
  while (out.evaluations < budget) {
    std::vector<Vec> trial = out.points;
    const auto i = static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(k));
    for (int c = 0; c < space.dim(); ++c) trial[i][c] += step * gaussian(rng);
    trial[i] /= space.norm(trial[i]);
    const double v = evaluate(trial);
    ++out.evaluations;
    if (v > best) {
      best = v;
      out.points = std::move(trial);
      since_improvement = 0;
    } else if (++since_improvement >= 50) {
      step = std::max(step * 0.5, 1e-4);
      since_improvement = 0;
    }
  }
  out.distortion = std::max(1.0, 1.0 + best);
  return out;
}

const std::vector<double>& nu_grid() {
  static const std::vector<double> grid = {0.30, 0.25, 0.20, 0.15, 0.10, 0.05, 0.01};
  return grid;
}

bool parameter_chain_holds(const NonOctaCertificate& c, double slack) {
  return (1.0 + c.nu) / (1.0 - 3.0 * c.nu) + slack <= 1.0 + c.eps0 && c.eta + slack <= c.nu / 2.0 &&
         c.delta0 + slack <= c.nu / 2.0 && c.delta0 > 0.0;
}

NonOctaCertificate non_octa_certificate(double p, int n, int m, const NonOctaConfig& cfg) {
  require(p >= 1.0, "p outside [1, inf]");
  require(n >= 2 && m >= 1, "need n >= 2 and m >= 1");
  NonOctaCertificate cert;
  cert.p = p;
  cert.n = n;
  cert.m = m;
  const NormedSpace dual_space = NormedSpace::lp(conjugate_exponent(p), n);
  cert.search = cfg.search ? *cfg.search : point_config_search(dual_space, cfg.search_points, cfg.search_budget, cfg.seed);
  cert.eps0 = cert.search.distortion - 1.0;
  if (cert.eps0 <= 1e-9) throw Error("obstruction not established");
  cert.evidence = cut_cone_membership(distance_matrix(dual_space, cert.search.points));

  const double required = (1.0 + nu_grid().back()) / (1.0 - 3.0 * nu_grid().back()) - 1.0;
  for (double nu : nu_grid()) {
    if ((1.0 + nu) / (1.0 - 3.0 * nu) + 1e-9 <= 1.0 + cert.eps0) {
      cert.nu = nu;
      break;
    }
  }
  if (cert.nu == 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "parameter chain infeasible: eps0 = %.9g, the nu grid needs eps0 > %.9g", cert.eps0,
                  required);
    throw Error(buf);
  }
  cert.eta = cert.nu / 4.0;
  cert.delta_hat = uniform_convexity_modulus(dual_space, cert.eta, cfg.modulus_budget, cfg.seed).delta_hat;
  cert.delta0 = 0.9 * cert.delta_hat;
  require(cert.delta0 > 0.0, "modulus estimate vanished; no usable certificate slack");
  require(parameter_chain_holds(cert), "parameter chain infeasible for the modulus estimate");

  cert.net = sphere_net(dual_space, cert.nu, cfg.net_budget, cfg.seed, cert.search.points);
  for (const auto& f : cert.net.points) cert.attaining.push_back(dual_space.norming_functional(f));
  const NormedSpace l1 = NormedSpace::lp(1, m);
  const NormedSpace y_space = NormedSpace::lp(p, n);
  cert.x = l1.unit_basis(0);
  for (const auto& y : cert.attaining) cert.family.push_back(Tensor::rank_one(l1, y_space, cert.x, y));
  return cert;
}

Mat LevyRepresentation::embedding() const {
  Mat E(grid, 2);
  for (int j = 0; j < grid; ++j) {
    const double t = kPi * j / grid;
    E(j, 0) = grid * weights[j] * std::cos(t);
    E(j, 1) = grid * weights[j] * std::sin(t);
  }
  return E;
}

namespace {

double levy_eval(const Vec& w, int grid, double a, double b) {
  double s = 0.0;
  for (int j = 0; j < grid; ++j) {
    const double t = kPi * j / grid;
    s += w[j] * std::abs(a * std::cos(t) + b * std::sin(t));
  }
  return s;
}

double levy_distortion(const NormedSpace& space, const Vec& w, int grid, int samples) {
  double lo = kInf, hi = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double alpha = kPi * (s + 0.5) / samples;
    Vec u(2);
    u << std::cos(alpha), std::sin(alpha);
    u /= space.norm(u);
    const double r = levy_eval(w, grid, u[0], u[1]);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return lo > 0.0 ? hi / lo : kInf;
}

}  // namespace

LevyRepresentation levy_embedding_2d(const NormedSpace& space, int grid, double tol) {
  require(space.dim() == 2, "levy embedding needs a 2-dimensional space");
  require(grid >= 64, "levy grid must be at least 64");
  require(tol > 0.0, "tolerance must be positive");
  for (int g = grid; g <= std::max(grid, kLevyMaxGrid); g *= 2) {
    // Variables (w_0..w_{g-1}, e); maximize -e.
    const int T = kLevyTestDirections;
    Mat A = Mat::Zero(2 * T + g, g + 1);
    Vec b = Vec::Zero(2 * T + g);
    for (int t = 0; t < T; ++t) {
      const double alpha = kPi * t / T;
      Vec u(2);
      u << std::cos(alpha), std::sin(alpha);
      u /= space.norm(u);
      for (int j = 0; j < g; ++j) {
        const double th = kPi * j / g;
        const double a = std::abs(u[0] * std::cos(th) + u[1] * std::sin(th));
        A(2 * t, j) = a;
        A(2 * t + 1, j) = -a;
      }
      A(2 * t, g) = -1.0;
      A(2 * t + 1, g) = -1.0;
      b[2 * t] = 1.0;
      b[2 * t + 1] = -1.0;
    }
    for (int j = 0; j < g; ++j) A(2 * T + j, j) = -1.0;
    Vec c = Vec::Zero(g + 1);
    c[g] = -1.0;
    const auto r = lp::maximize(c, A, b);
    require(r.status == lp::Status::Optimal, "levy fit LP failed: " + lp::to_string(r.status));
    LevyRepresentation rep{space, g, r.x.head(g).cwiseMax(0.0), std::max(0.0, -r.value), 1.0};
    rep.distortion = levy_distortion(space, rep.weights, g, 10000);
    if (rep.fit_error <= tol && rep.distortion <= 1.0 + 2.0 * tol) return rep;
  }
  throw Error("increase grid");
}

std::string format_cut_cone(const CutConeCertificate& cert) {
  std::ostringstream out;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::string(buf);
  };
  out << "points = " << cert.D.rows() << '\n';
  out << "outcome = " << (cert.feasible ? "feasible" : "infeasible") << '\n';
  for (const auto& c : cert.cuts) {
    out << "cut = {";
    bool first = true;
    for (int i = 0; i < cert.D.rows(); ++i) {
      if ((c.mask >> i) & 1u) {
        out << (first ? "" : ",") << (i + 1);
        first = false;
      }
    }
    out << "}:" << num(c.weight) << '\n';
  }
  if (!cert.feasible) {
    for (Eigen::Index i = 0; i < cert.separator.rows(); ++i)
      out << "separator." << i << " = " << format_vector(cert.separator.row(i).transpose()) << '\n';
    if (cert.negative_type) {
      out << "negative_type.b =";
      for (Eigen::Index i = 0; i < cert.negative_type->size(); ++i) out << ' ' << (*cert.negative_type)[i];
      out << '\n' << "negative_type.Q = " << num(cert.negative_type_value) << '\n';
    }
  }
  return out.str();
}

}  // namespace octa
