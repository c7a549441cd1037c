#include "octa/tensor_norms.hpp"

#include "octa/lp.hpp"
#include "octa/parallel.hpp"
#include "octa/random.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace octa {

Tensor::Tensor(NormedSpace x_space, NormedSpace y_space, Mat c)
    : X(std::move(x_space)), Y(std::move(y_space)), coeffs(std::move(c)) {
  require(coeffs.rows() == X.dim() && coeffs.cols() == Y.dim(),
          "tensor coefficients must be dim X by dim Y");
  require(coeffs.allFinite(), "tensor coefficients must be finite");
}

Tensor Tensor::zero(const NormedSpace& x_space, const NormedSpace& y_space) {
  return Tensor(x_space, y_space, Mat::Zero(x_space.dim(), y_space.dim()));
}

Tensor Tensor::rank_one(const NormedSpace& x_space, const NormedSpace& y_space, const Vec& x, const Vec& y) {
  return Tensor(x_space, y_space, x * y.transpose());
}

double pairing(const Mat& T, const Tensor& u) {
  require(T.rows() == u.coeffs.rows() && T.cols() == u.coeffs.cols(), "pairing shape mismatch");
  return (T.array() * u.coeffs.array()).sum();
}

namespace {

constexpr double kHuge = std::numeric_limits<double>::infinity();

// sup of sum |x_i| over the unit ball of an unconditional norm: the norm of
// the all-ones vector in the dual.
double id_to_l1(const NormedSpace& s) { return s.dual().norm(Vec::Ones(s.dim())); }
double id_from_linf(const NormedSpace& s) { return s.norm(Vec::Ones(s.dim())); }

double id_to_l2(const NormedSpace& s) {
  if (s.kind() != NormedSpace::Kind::Lp) return kHuge;
  const double e = std::max(0.0, 0.5 - 1.0 / s.p());
  return std::pow(static_cast<double>(s.dim()), e);
}
double id_from_l2(const NormedSpace& s) {
  if (s.kind() != NormedSpace::Kind::Lp) return kHuge;
  const double inv = s.p() == kInf ? 0.0 : 1.0 / s.p();
  return std::pow(static_cast<double>(s.dim()), std::max(0.0, inv - 0.5));
}

// Unit vector x in `space` with g(x) = ||g||_{space*}; g nonzero.
Vec norming_vector(const NormedSpace& space, const Vec& g, double gnorm) {
  return space.dual().norming_functional(g / gnorm);
}

NormCertificate exact_cert(double value, Vec primal, Vec dual, std::string route) {
  NormCertificate c;
  c.value = c.lower = c.upper = value;
  c.exactness = Exactness::Exact;
  c.primal = std::move(primal);
  c.dual = std::move(dual);
  c.route = std::move(route);
  return c;
}

// Cheap exact cases -------------------------------------------------------

NormCertificate by_columns(const Mat& A, const NormedSpace& dom, const NormedSpace& cod) {
  int best = 0;
  double best_val = -1.0;
  for (int j = 0; j < dom.dim(); ++j) {
    const double v = cod.norm(A.col(j)) / dom.weight(j);
    if (v > best_val) {
      best_val = v;
      best = j;
    }
  }
  Vec x = Vec::Zero(dom.dim());
  x[best] = 1.0 / dom.weight(best);
  const Vec ax = A * x;
  Vec f = best_val > 0.0 ? cod.norming_functional(ax / best_val) : cod.dual().unit_basis(0);
  return exact_cert(best_val, std::move(x), std::move(f), "columns");
}

NormCertificate by_rows(const Mat& A, const NormedSpace& dom, const NormedSpace& cod) {
  const NormedSpace dom_star = dom.dual();
  int best = 0;
  double best_val = -1.0;
  for (int c = 0; c < cod.dim(); ++c) {
    const double v = dom_star.norm(A.row(c).transpose()) / cod.weight(c);
    if (v > best_val) {
      best_val = v;
      best = c;
    }
  }
  const Vec row = A.row(best).transpose();
  const double rn = dom_star.norm(row);
  Vec x = rn > 0.0 ? norming_vector(dom, row, rn) : dom.unit_basis(0);
  Vec f = Vec::Zero(cod.dim());
  f[best] = ((row.dot(x) < 0.0) ? -1.0 : 1.0) / cod.weight(best);
  return exact_cert(best_val, std::move(x), std::move(f), "rows");
}

NormCertificate by_svd(const Mat& A) {
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double s = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  Vec v = svd.matrixV().col(0);
  Vec u = svd.matrixU().col(0);
  v /= v.norm();
  u /= u.norm();
  if (u.dot(A * v) < 0.0) u = -u;
  return exact_cert(s, std::move(v), std::move(u), "svd");
}

// Sign enumeration (codomain l1-type) -------------------------------------
//
// ||A|| = max over s in {+-1}^m of ||A^T (w . s)||_{dom*}. The last sign is
// fixed to +1 (s and -s give the same value).

struct SignBest {
  double value = -1.0;
  std::uint64_t index = 0;
  Vec signs;
};

SignBest signs_gray(const Mat& A, const NormedSpace& dom, const NormedSpace& cod) {
  const int m = static_cast<int>(A.rows());
  const NormedSpace dom_star = dom.dual();
  Mat WA = A;
  for (int c = 0; c < m; ++c) WA.row(c) *= cod.weight(c);
  const std::uint64_t total = std::uint64_t{1} << (m - 1);
  constexpr std::uint64_t kChunk = 1u << 14;
  const std::uint64_t chunks = (total + kChunk - 1) / kChunk;
  std::vector<SignBest> partial(chunks);

  parallel_for(chunks, [&](std::size_t ci) {
    const std::uint64_t begin = ci * kChunk;
    const std::uint64_t end = std::min(total, begin + kChunk);
    auto sign_of = [&](std::uint64_t gray, int c) { return (c < m - 1 && ((gray >> c) & 1u)) ? -1.0 : 1.0; };
    std::uint64_t gray = begin ^ (begin >> 1);
    Vec g = Vec::Zero(A.cols());
    for (int c = 0; c < m; ++c) g += sign_of(gray, c) * WA.row(c).transpose();
    SignBest best;
    for (std::uint64_t i = begin; i < end; ++i) {
      if (i != begin) {
        const int c = std::countr_zero(i);
        const double old = sign_of(gray, c);
        gray ^= std::uint64_t{1} << c;
        g -= 2.0 * old * WA.row(c).transpose();
      }
      const double v = dom_star.norm(g);
      if (v > best.value) {
        best.value = v;
        best.index = gray;
      }
    }
    partial[ci] = best;
  });

  SignBest best;
  for (auto& p : partial)
    if (p.value > best.value) best = p;
  best.signs.resize(m);
  for (int c = 0; c < m; ++c) best.signs[c] = (c < m - 1 && ((best.index >> c) & 1u)) ? -1.0 : 1.0;
  // Re-evaluate from scratch so the reported value is path independent.
  best.value = dom_star.norm(WA.transpose() * best.signs);
  return best;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

struct CellPlan {
  int rank = 0;
  Mat reduced;  // A Q, rows are the hyperplane normals in the row space
  double count = 0.0;
};

CellPlan plan_cells(const Mat& A) {
  CellPlan plan;
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double tol = (sv.size() ? sv[0] : 0.0) * 1e-12 * std::max(A.rows(), A.cols());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > tol) ++plan.rank;
  if (plan.rank == 0) return plan;
  plan.reduced = A * svd.matrixV().leftCols(plan.rank);
  plan.count = binomial(static_cast<int>(A.rows()), plan.rank - 1) * std::pow(2.0, plan.rank);
  return plan;
}

constexpr int kMaxZeroFill = 16;

// Candidate sign vectors are the cells incident to the extreme rays of the
// arrangement {B_c^T x = 0}: every cell of an essential central arrangement
// is pointed, so each contains such a ray, and all fills of the zero
// coordinates at a ray enumerate its incident cells. Returns false when the
// arrangement is too degenerate (too many coordinates vanish at a ray).
bool signs_cells(const Mat& A, const NormedSpace& dom, const NormedSpace& cod, const CellPlan& plan,
                 SignBest& out) {
  const int m = static_cast<int>(A.rows());
  const NormedSpace dom_star = dom.dual();
  Vec w = Vec::Ones(m);
  for (int c = 0; c < m; ++c) w[c] = cod.weight(c);
  const Mat& B = plan.reduced;
  const int r = plan.rank;
  Vec row_norm(m);
  for (int c = 0; c < m; ++c) row_norm[c] = B.row(c).norm();

  SignBest best;
  std::uint64_t counter = 0;
  bool ok = true;
  Vec ws(m), g(A.cols());
  auto consider = [&](const Vec& s) {
    // Canonical orientation: last sign +1.
    const double flip = s[m - 1] < 0.0 ? -1.0 : 1.0;
    ws = w.cwiseProduct(s) * flip;
    g.noalias() = A.transpose() * ws;
    const double v = dom_star.norm(g);
    if (v > best.value) {
      best.value = v;
      best.index = counter;
      best.signs = s * flip;
    }
    ++counter;
  };

  // Zero rows never matter; parallel rows share one sign up to orientation,
  // so fills run over classes of parallel rows.
  std::vector<int> cls(static_cast<std::size_t>(m), -1);
  Vec orient = Vec::Ones(m);
  std::vector<Vec> reps;
  for (int c = 0; c < m; ++c) {
    if (row_norm[c] <= 1e-12 * row_norm.maxCoeff()) continue;
    const Vec u = B.row(c).transpose() / row_norm[c];
    for (std::size_t k = 0; k < reps.size() && cls[static_cast<std::size_t>(c)] < 0; ++k) {
      if ((u - reps[k]).norm() <= 1e-10) cls[static_cast<std::size_t>(c)] = static_cast<int>(k);
      else if ((u + reps[k]).norm() <= 1e-10) {
        cls[static_cast<std::size_t>(c)] = static_cast<int>(k);
        orient[c] = -1.0;
      }
    }
    if (cls[static_cast<std::size_t>(c)] < 0) {
      cls[static_cast<std::size_t>(c)] = static_cast<int>(reps.size());
      reps.push_back(u);
    }
  }

  Vec vals(m), s(m);
  std::vector<char> forced(static_cast<std::size_t>(m), 0);
  std::vector<int> zero_classes;
  auto visit_ray = [&](const Vec& v) {
    vals.noalias() = B * v;
    zero_classes.clear();
    s.setOnes();
    for (int c = 0; c < m; ++c) {
      const int k = cls[static_cast<std::size_t>(c)];
      if (k < 0) continue;
      if (forced[static_cast<std::size_t>(c)] || std::abs(vals[c]) <= 1e-10 * row_norm[c]) {
        if (std::find(zero_classes.begin(), zero_classes.end(), k) == zero_classes.end()) zero_classes.push_back(k);
      } else {
        s[c] = vals[c] > 0.0 ? 1.0 : -1.0;
      }
    }
    if (static_cast<int>(zero_classes.size()) > kMaxZeroFill) {
      ok = false;
      return;
    }
    const std::uint64_t fills = std::uint64_t{1} << zero_classes.size();
    for (std::uint64_t f = 0; f < fills; ++f) {
      for (std::size_t z = 0; z < zero_classes.size(); ++z) {
        const double sign = ((f >> z) & 1u) ? -1.0 : 1.0;
        for (int c = 0; c < m; ++c)
          if (cls[static_cast<std::size_t>(c)] == zero_classes[z]) s[c] = sign * orient[c];
      }
      consider(s);
    }
  };

  if (r == 1) {
    Vec v(1);
    v[0] = 1.0;
    visit_ray(v);
    visit_ray(-v);
  } else {
    std::vector<int> subset(static_cast<std::size_t>(r - 1));
    for (int i = 0; i < r - 1; ++i) subset[static_cast<std::size_t>(i)] = i;
    Mat M(r - 1, r);
    Vec v(r);
    while (ok) {
      for (int i = 0; i < r - 1; ++i) M.row(i) = B.row(subset[static_cast<std::size_t>(i)]);
      bool found = false;
      if (r == 3) {
        // Kernel of two rows in R^3 is their cross product.
        const Eigen::Vector3d a = M.row(0).transpose(), b = M.row(1).transpose();
        const Eigen::Vector3d x = a.cross(b);
        found = x.norm() > 1e-10 * a.norm() * b.norm();
        if (found) v = x / x.norm();
      } else {
        Eigen::FullPivLU<Mat> lu(M);
        lu.setThreshold(1e-10);
        found = lu.rank() == r - 1;
        if (found) {
          v = lu.kernel().col(0);
          v /= v.norm();
        }
      }
      if (found) {
        for (int i : subset) forced[static_cast<std::size_t>(i)] = 1;
        visit_ray(v);
        visit_ray(-v);
        for (int i : subset) forced[static_cast<std::size_t>(i)] = 0;
      }
      // next combination
      int k = r - 2;
      while (k >= 0 && subset[static_cast<std::size_t>(k)] == m - (r - 1) + k) --k;
      if (k < 0) break;
      ++subset[static_cast<std::size_t>(k)];
      for (int i = k + 1; i < r - 1; ++i) subset[static_cast<std::size_t>(i)] = subset[static_cast<std::size_t>(i - 1)] + 1;
    }
  }
  if (!ok || best.value < 0.0) return false;
  best.value = dom_star.norm(A.transpose() * w.cwiseProduct(best.signs));
  out = best;
  return true;
}

NormCertificate from_signs(const Mat& A, const NormedSpace& dom, const NormedSpace& cod, const SignBest& best,
                           std::string route) {
  Vec f(cod.dim());
  for (int c = 0; c < cod.dim(); ++c) f[c] = cod.weight(c) * best.signs[c];
  const Vec g = A.transpose() * f;
  Vec x = best.value > 0.0 ? norming_vector(dom, g, best.value) : dom.unit_basis(0);
  return exact_cert(best.value, std::move(x), std::move(f), std::move(route));
}

// Bounds-only route -------------------------------------------------------

NormCertificate alternating(const Mat& A, const NormedSpace& dom, const NormedSpace& cod, const OperatorNormOptions& o) {
  const NormedSpace dom_star = dom.dual();
  std::vector<Vec> starts;
  for (int j = 0; j < dom.dim(); ++j) starts.push_back(dom.unit_basis(j));
  auto rng = stream(o.seed, 0x616c74);
  for (int k = 0; k < o.budget; ++k) starts.push_back(dom.random_unit(rng));

  struct Run {
    double value = -1.0;
    Vec x, f;
  };
  std::vector<Run> runs(starts.size());
  parallel_for(starts.size(), [&](std::size_t k) {
    Vec x = starts[k];
    Run r;
    for (int it = 0; it < 200; ++it) {
      const Vec ax = A * x;
      const double v = cod.norm(ax);
      if (v <= r.value + 1e-14) break;
      r.value = v;
      r.x = x;
      if (v == 0.0) {
        r.f = cod.dual().unit_basis(0);
        break;
      }
      r.f = cod.norming_functional(ax / v);
      const Vec g = A.transpose() * r.f;
      const double gn = dom_star.norm(g);
      if (gn == 0.0) break;
      x = norming_vector(dom, g, gn);
    }
    runs[k] = std::move(r);
  });
  Run best;
  for (auto& r : runs)
    if (r.value > best.value) best = r;

  double upper = id_to_l1(dom) * by_columns(A, NormedSpace::lp(1, dom.dim()), cod).value;
  upper = std::min(upper, by_rows(A, dom, NormedSpace::lp(kInf, cod.dim())).value * id_from_linf(cod));
  const double l2 = id_to_l2(dom) * id_from_l2(cod);
  if (std::isfinite(l2)) upper = std::min(upper, l2 * by_svd(A).value);
  upper = std::max(upper, best.value);

  NormCertificate c;
  c.value = c.lower = best.value;
  c.upper = upper;
  c.exactness = upper - best.value <= 1e-12 * std::max(1.0, upper) ? Exactness::Exact : Exactness::Bounds;
  c.primal = std::move(best.x);
  c.dual = std::move(best.f);
  c.route = "alternating";
  return c;
}

enum class Plan { Columns, Rows, Svd, SignsCod, SignsDom, None };

struct RouteChoice {
  Plan plan = Plan::None;
  double cost = kHuge;
};

double sign_cost(int m, int rank_guess_cols) {
  const double gray = m <= kSignEnumerationLimit ? std::ldexp(1.0, m - 1) : kHuge;
  const int r = std::min(m, rank_guess_cols);
  const double cells = binomial(m, r - 1) * std::pow(2.0, r);
  return std::min(gray, cells);
}

RouteChoice choose_route(const NormedSpace& dom, const NormedSpace& cod) {
  RouteChoice best;
  auto offer = [&](Plan p, double cost) {
    if (cost < best.cost) best = {p, cost};
  };
  const int m = cod.dim(), n = dom.dim();
  if (dom.is_l1_type()) offer(Plan::Columns, n);
  if (cod.is_linf_type()) offer(Plan::Rows, m);
  if (dom.is_hilbert() && cod.is_hilbert()) offer(Plan::Svd, static_cast<double>(m) * n);
  if (cod.is_l1_type()) offer(Plan::SignsCod, sign_cost(m, n) * n);
  if (dom.is_linf_type()) offer(Plan::SignsDom, sign_cost(n, m) * m);
  constexpr double kExactBudget = 64.0 * (1u << 23);
  if (best.cost > kExactBudget) best = {};
  return best;
}

NormCertificate signs_exact(const Mat& A, const NormedSpace& dom, const NormedSpace& cod, OperatorRoute route) {
  const int m = cod.dim();
  if (route == OperatorRoute::SignGray) {
    require(m <= kSignEnumerationLimit, "enumeration limit: codomain dimension " + std::to_string(m) + " > " +
                                            std::to_string(kSignEnumerationLimit));
    return from_signs(A, dom, cod, signs_gray(A, dom, cod), "signs-gray");
  }
  const CellPlan plan = plan_cells(A);
  if (plan.rank == 0) return exact_cert(0.0, dom.unit_basis(0), cod.dual().unit_basis(0), "zero");
  const double gray_count = m <= kSignEnumerationLimit ? std::ldexp(1.0, m - 1) : kHuge;
  if (route == OperatorRoute::SignCells || plan.count < gray_count) {
    SignBest best;
    if (signs_cells(A, dom, cod, plan, best)) return from_signs(A, dom, cod, best, "signs-cells");
    require(route != OperatorRoute::SignCells, "degenerate arrangement for cell enumeration");
  }
  require(m <= kSignEnumerationLimit, "enumeration limit: codomain dimension " + std::to_string(m) + " > " +
                                          std::to_string(kSignEnumerationLimit));
  return from_signs(A, dom, cod, signs_gray(A, dom, cod), "signs-gray");
}

}  // namespace

bool operator_norm_is_exact(const NormedSpace& dom, const NormedSpace& cod) {
  return choose_route(dom, cod).plan != Plan::None;
}

NormCertificate operator_norm(const Mat& A, const NormedSpace& dom, const NormedSpace& cod,
                              const OperatorNormOptions& opts) {
  require(A.rows() == cod.dim() && A.cols() == dom.dim(), "operator shape does not match spaces");
  require(!A.hasNaN(), "operator has NaN entries");
  require(A.allFinite(), "operator has non-finite entries");

  if (opts.route == OperatorRoute::Alternating) return alternating(A, dom, cod, opts);
  if (opts.route == OperatorRoute::SignGray || opts.route == OperatorRoute::SignCells) {
    require(cod.is_l1_type(), "sign enumeration needs an l1-type codomain");
    return signs_exact(A, dom, cod, opts.route);
  }

  const RouteChoice choice = choose_route(dom, cod);
  switch (choice.plan) {
    case Plan::Columns:
      return by_columns(A, dom, cod);
    case Plan::Rows:
      return by_rows(A, dom, cod);
    case Plan::Svd:
      return by_svd(A);
    case Plan::SignsCod:
      return signs_exact(A, dom, cod, OperatorRoute::Auto);
    case Plan::SignsDom: {
      // ||A : dom -> cod|| = ||A^T : cod* -> dom*|| and dom* is l1-type.
      NormCertificate t = signs_exact(A.transpose(), cod.dual(), dom.dual(), OperatorRoute::Auto);
      std::swap(t.primal, t.dual);
      t.route += "-transposed";
      return t;
    }
    case Plan::None:
      break;
  }
  if (opts.require_exact) {
    throw Error("enumeration limit: no exact route for " + dom.to_string() + " -> " + cod.to_string());
  }
  return alternating(A, dom, cod, opts);
}

NormCertificate injective_norm(const Tensor& u, const OperatorNormOptions& opts) {
  // Orientation 1: C^T : X* -> Y. Orientation 2: C : Y* -> X.
  const NormedSpace xs = u.X.dual(), ys = u.Y.dual();
  const RouteChoice one = choose_route(xs, u.Y);
  const RouteChoice two = choose_route(ys, u.X);
  const bool use_two = two.cost < one.cost;
  NormCertificate c = use_two ? operator_norm(u.coeffs, ys, u.X, opts) : operator_norm(u.coeffs.transpose(), xs, u.Y, opts);
  if (use_two) {
    // primal in Y*, dual (functional on X) in X*.
    std::swap(c.primal, c.dual);
    c.route = "transpose:" + c.route;
  }
  return c;
}

double injective_value(const Tensor& u) { return injective_norm(u).value; }

NormCertificate projective_norm(const Tensor& u, const ProjectiveOptions& opts) {
  const int m = u.rows(), n = u.cols();
  require(m <= 12 && n <= 12, "projective norm supports at most 12 x 12 tensors");
  require(opts.tol > 0.0, "tolerance must be positive");
  NormCertificate cert;
  cert.route = "cutting-plane";
  cert.dual_operator = Mat::Zero(m, n);
  if (u.coeffs.isZero(0.0)) return cert;

  // l2 (x)_pi l2 is the trace class: nuclear norm, dual witness U V^T.
  if (u.X.is_hilbert() && u.Y.is_hilbert()) {
    Eigen::JacobiSVD<Mat> svd(u.coeffs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& s = svd.singularValues();
    const double floor = 1e-14 * s[0];
    Eigen::Index r = 0;
    while (r < s.size() && s[r] > floor) ++r;
    cert.route = "nuclear";
    cert.value = cert.upper = s.head(r).sum();
    cert.dual_operator = svd.matrixU().leftCols(r) * svd.matrixV().leftCols(r).transpose();
    cert.lower = std::min(pairing(cert.dual_operator, u), cert.value);
    for (Eigen::Index k = 0; k < r; ++k) cert.decomposition.push_back({s[k], svd.matrixU().col(k), svd.matrixV().col(k)});
    return cert;
  }

  const NormedSpace y_star = u.Y.dual();
  struct Cut {
    Vec x, y;
  };
  std::vector<Cut> cuts;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      for (double sg : {1.0, -1.0}) cuts.push_back({sg * u.X.unit_basis(i), u.Y.unit_basis(j)});
    }
  }
  const std::size_t initial = cuts.size();

  Vec c(m * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) c[i * n + j] = u.coeffs(i, j);

  double best_lower = 0.0;
  Mat best_T = Mat::Zero(m, n);
  bool exact_sep = true;
  bool converged = false;
  lp::Result res;
  while (true) {
    Mat A(static_cast<Eigen::Index>(cuts.size()), m * n);
    for (std::size_t k = 0; k < cuts.size(); ++k) {
      const Mat xy = cuts[k].x * cuts[k].y.transpose();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) A(static_cast<Eigen::Index>(k), i * n + j) = xy(i, j);
    }
    res = lp::maximize(c, A, Vec::Ones(static_cast<Eigen::Index>(cuts.size())));
    require(res.status == lp::Status::Optimal, "cutting-plane LP failed: " + lp::to_string(res.status));
    Mat T(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) T(i, j) = res.x[i * n + j];

    // T as a map X -> Y*: (T x)_j = sum_i T(i,j) x_i.
    const NormCertificate sep = operator_norm(T.transpose(), u.X, y_star, opts.separation);
    exact_sep = exact_sep && sep.exact();
    const double scale = std::max(1.0, sep.upper);
    if (res.value / scale > best_lower) {
      best_lower = res.value / scale;
      best_T = T / scale;
    }
    if (res.value - best_lower <= opts.tol) {
      converged = true;
      break;
    }
    if (sep.lower <= 1.0 + 1e-12) break;  // no violated cut available
    if (static_cast<int>(cuts.size() - initial) >= opts.max_cuts) break;
    cuts.push_back({sep.primal, sep.dual});
  }

  cert.cuts = static_cast<int>(cuts.size() - initial);
  cert.upper = cert.value = res.value;
  cert.lower = std::min(best_lower, res.value);
  cert.exactness = converged && exact_sep ? Exactness::Exact : Exactness::Bounds;
  cert.dual_operator = best_T;
  const double floor = 1e-12 * std::max(1.0, res.value);
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    const double lam = res.multipliers[static_cast<Eigen::Index>(k)];
    if (lam > floor) cert.decomposition.push_back({lam, cuts[k].x, cuts[k].y});
  }
  return cert;
}

Mat read_matrix(std::istream& in) {
  long m = 0, n = 0;
  require(static_cast<bool>(in >> m >> n) && m >= 1 && n >= 1, "matrix header must be `m n` with positive sizes");
  Mat M(m, n);
  for (long i = 0; i < m; ++i) {
    for (long j = 0; j < n; ++j) {
      std::string tok;
      require(static_cast<bool>(in >> tok), "matrix file truncated");
      M(i, j) = parse_vector(tok)[0];
    }
  }
  return M;
}

Mat read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open matrix file '" + path + "'");
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const Mat& M) {
  out << M.rows() << ' ' << M.cols() << '\n';
  for (Eigen::Index i = 0; i < M.rows(); ++i) out << format_vector(M.row(i).transpose()) << '\n';
}

std::string format_certificate(const NormCertificate& cert) {
  auto num = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "value = " << num(cert.value) << '\n';
  out << "exactness = " << (cert.exact() ? "exact" : "bounds") << '\n';
  out << "lower = " << num(cert.lower) << '\n';
  out << "upper = " << num(cert.upper) << '\n';
  out << "gap = " << num(cert.gap()) << '\n';
  out << "route = " << cert.route << '\n';
  if (cert.cuts) out << "cuts = " << cert.cuts << '\n';
  if (cert.primal.size()) out << "witness.primal = " << format_vector(cert.primal) << '\n';
  if (cert.dual.size()) out << "witness.dual = " << format_vector(cert.dual) << '\n';
  for (std::size_t k = 0; k < cert.decomposition.size(); ++k) {
    const auto& t = cert.decomposition[k];
    out << "witness.term." << k << " = " << num(t.weight) << " | " << format_vector(t.x) << " | "
        << format_vector(t.y) << '\n';
  }
  if (cert.dual_operator.size() && !cert.dual_operator.isZero(0.0)) {
    for (Eigen::Index i = 0; i < cert.dual_operator.rows(); ++i)
      out << "witness.operator." << i << " = " << format_vector(cert.dual_operator.row(i).transpose()) << '\n';
  }
  return out.str();
}

}  // namespace octa
