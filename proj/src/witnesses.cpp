#include "octa/witnesses.hpp"

#include "octa/lp.hpp"
#include "octa/random.hpp"

#include <algorithm>
#include <cmath>

namespace octa {

namespace {

constexpr double kUnitTol = 1e-8;

double exact_norm(const Mat& A, const NormedSpace& dom, const NormedSpace& cod) {
  OperatorNormOptions opts;
  opts.require_exact = true;
  return operator_norm(A, dom, cod, opts).value;
}

NormCertificate exact_certificate(const Mat& A, const NormedSpace& dom, const NormedSpace& cod) {
  OperatorNormOptions opts;
  opts.require_exact = true;
  return operator_norm(A, dom, cod, opts);
}

void require_norm_one(const std::vector<Mat>& T, const NormedSpace& X, const NormedSpace& cod) {
  require(!T.empty(), "operator family must be nonempty");
  for (const auto& A : T) {
    require(A.rows() == cod.dim() && A.cols() == X.dim(), "operator shape does not match the spaces");
    require(std::abs(exact_norm(A, X, cod) - 1.0) <= 1e-6, "operators must have norm one");
  }
}

double tail_mass(const Vec& v, Eigen::Index from, const NormedSpace& space) {
  double s = 0.0;
  for (Eigen::Index c = from; c < v.size(); ++c) s += space.weight(static_cast<int>(c)) * std::abs(v[c]);
  return s;
}

bool below(double tail, double limit) { return tail == 0.0 || tail < limit; }

WitnessCheck check(std::vector<double> values, double bound) {
  WitnessCheck r;
  r.values = std::move(values);
  r.bound = bound;
  r.passed = r.min_value() >= bound - 1e-9;
  return r;
}

double ratio_spread(const std::vector<double>& ratios) {
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  return *lo > 0.0 ? *hi / *lo : kInf;
}

SphereNet test_net(const NormedSpace& X) { return sphere_net(X, X.dim() <= 3 ? 0.1 : 0.25, 500, 1); }

}  // namespace

double WitnessCheck::min_value() const {
  return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
}

Mat pad_rows(const Mat& A, int rows) {
  require(rows >= A.rows(), "padding cannot remove rows");
  Mat P = Mat::Zero(rows, A.cols());
  P.topRows(A.rows()) = A;
  return P;
}

double embedding_distortion(const NormedSpace& X, const Mat& psi) {
  require(psi.cols() == X.dim(), "embedding shape does not match the domain");
  const auto net = test_net(X);
  std::vector<double> ratios;
  for (const auto& x : net.points) ratios.push_back((psi * x).cwiseAbs().sum());
  return ratio_spread(ratios);
}

L1Embedding fit_l1_embedding(const NormedSpace& X, const Mat& directions) {
  require(directions.cols() == X.dim() && directions.rows() >= 1, "direction matrix must be J x dim X");
  const auto net = test_net(X);
  const auto J = directions.rows();
  const auto T = static_cast<Eigen::Index>(net.points.size());
  // Variables (w_1..w_J, e); maximize -e subject to |fit - 1| <= e, w >= 0.
  Mat A = Mat::Zero(2 * T + J, J + 1);
  Vec b = Vec::Zero(2 * T + J);
  for (Eigen::Index t = 0; t < T; ++t) {
    const Vec a = (directions * net.points[static_cast<std::size_t>(t)]).cwiseAbs();
    A.row(2 * t).head(J) = a.transpose();
    A.row(2 * t + 1).head(J) = -a.transpose();
    A(2 * t, J) = A(2 * t + 1, J) = -1.0;
    b[2 * t] = 1.0;
    b[2 * t + 1] = -1.0;
  }
  for (Eigen::Index j = 0; j < J; ++j) A(2 * T + j, j) = -1.0;
  Vec c = Vec::Zero(J + 1);
  c[J] = -1.0;
  const auto r = lp::maximize(c, A, b);
  require(r.status == lp::Status::Optimal, "embedding fit LP failed: " + lp::to_string(r.status));
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < J; ++j)
    if (r.x[j] > 1e-12) keep.push_back(j);
  require(!keep.empty(), "embedding fit produced no weights");
  Mat psi(static_cast<Eigen::Index>(keep.size()), X.dim());
  for (std::size_t i = 0; i < keep.size(); ++i)
    psi.row(static_cast<Eigen::Index>(i)) = r.x[keep[i]] * directions.row(keep[i]);
  psi /= exact_norm(psi, X, NormedSpace::lp(1, static_cast<int>(psi.rows())));
  return {psi, embedding_distortion(X, psi)};
}

Mat default_directions(int dim, int count, std::uint64_t seed) {
  require(dim >= 1 && count >= 1, "need a positive dimension and count");
  std::vector<Vec> rows;
  for (int c = 0; c < dim && static_cast<int>(rows.size()) < count; ++c) rows.push_back(Vec::Unit(dim, c));
  if (dim >= 2 && dim <= 12) {
    for (std::uint32_t bits = 0; bits < (1u << (dim - 1)) && static_cast<int>(rows.size()) < count; ++bits) {
      Vec v(dim);
      v[0] = 1.0;
      for (int c = 1; c < dim; ++c) v[c] = ((bits >> (c - 1)) & 1u) ? -1.0 : 1.0;
      rows.push_back(v.normalized());
    }
  }
  auto rng = stream(seed, 0x646972);
  while (static_cast<int>(rows.size()) < count) {
    Vec v(dim);
    for (int c = 0; c < dim; ++c) v[c] = gaussian(rng);
    rows.push_back(v.normalized());
  }
  Mat D(count, dim);
  for (int i = 0; i < count; ++i) D.row(i) = rows[static_cast<std::size_t>(i)].transpose();
  return D;
}

Mat psi_from_levy(const LevyRepresentation& rep) {
  const Mat E = rep.embedding() / static_cast<double>(rep.grid);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < E.rows(); ++j)
    if (rep.weights[j] > 1e-12) keep.push_back(j);
  Mat psi(static_cast<Eigen::Index>(keep.size()), 2);
  for (std::size_t i = 0; i < keep.size(); ++i) psi.row(static_cast<Eigen::Index>(i)) = E.row(keep[i]);
  return psi;
}

ShiftWitness shift_witness(const std::vector<Mat>& T, const NormedSpace& X, const Mat& psi, double epsilon,
                           const ShiftOptions& opts) {
  require(epsilon >= 0.0, "epsilon must be nonnegative");
  require(!T.empty(), "operator family must be nonempty");
  const int m = static_cast<int>(T.front().rows());
  const NormedSpace cod = NormedSpace::lp(1, m);
  require_norm_one(T, X, cod);
  require(psi.cols() == X.dim() && psi.rows() >= 1, "psi must be d x dim X");
  const int d = static_cast<int>(psi.rows());

  ShiftWitness out;
  out.spec.psi = psi;
  out.spec.psi_distortion = embedding_distortion(X, psi);
  require(out.spec.psi_distortion <= 1.0 + epsilon + 1e-12, "psi distortion exceeds 1 + epsilon");

  std::vector<Vec> images, embedded;
  for (const auto& A : T) {
    const Vec x = exact_certificate(A, X, cod).primal;
    images.push_back(A * x);
    embedded.push_back(psi * x);
  }
  const NormedSpace l1d = NormedSpace::lp(1, d);
  int k = 0;
  if (opts.k) {
    k = *opts.k;
    require(k >= 1, "truncation index must be positive");
  } else {
    for (k = 1; k <= std::max(m, d); ++k) {
      bool ok = true;
      for (std::size_t i = 0; i < T.size() && ok; ++i)
        ok = below(tail_mass(images[i], k, cod), epsilon) && below(tail_mass(embedded[i], k, l1d), epsilon);
      if (ok) break;
    }
  }
  out.spec.k = k;
  out.spec.output_dim = std::max(m, k + d);
  require(out.spec.output_dim <= opts.codomain_budget, "increase codomain budget");

  const int rows = out.spec.output_dim;
  const NormedSpace big = NormedSpace::lp(1, rows);
  Mat raw = Mat::Zero(rows, X.dim());
  for (int j = 0; j < std::min(k, d); ++j) raw.row(k + j) = psi.row(j);
  const double scale = exact_norm(raw, X, big);
  require(scale > 0.0, "truncated embedding vanished");
  out.S = raw / scale;

  std::vector<double> values;
  for (const auto& A : T) {
    out.padded.push_back(pad_rows(A, rows));
    values.push_back(exact_norm(out.padded.back() + out.S, X, big));
  }
  out.report = check(std::move(values), 2.0 - 5.0 * epsilon);
  return out;
}

Mat compression_matrix(int N, int I_size) {
  require(N >= 1 && I_size >= 1 && I_size <= N && N % I_size == 0, "suffix size must divide N");
  const int block = N / I_size;
  Mat S = Mat::Zero(N, N);
  // Slope N/|I| times the block mean of N/|I| cells: weight 1 per cell.
  for (int r = 0; r < I_size; ++r)
    for (int c = r * block; c < (r + 1) * block; ++c) S(N - I_size + r, c) = 1.0;
  return S;
}

IntervalWitness interval_witness(const std::vector<Mat>& T, const NormedSpace& X, const Mat& T0, double epsilon) {
  require(epsilon > 0.0, "epsilon must be positive");
  const int N = static_cast<int>(T0.rows());
  require(N >= 2 && (N & (N - 1)) == 0, "grid size must be a power of two");
  require(T0.cols() == X.dim(), "T0 must be N x dim X");
  const NormedSpace cod = NormedSpace::discretized_l1(N);
  require_norm_one(T, X, cod);

  IntervalWitness out;
  out.spec.grid_N = N;
  {
    const auto net = test_net(X);
    std::vector<double> ratios;
    for (const auto& x : net.points) ratios.push_back(cod.norm(T0 * x));
    out.spec.t0_distortion = ratio_spread(ratios);
  }
  require(out.spec.t0_distortion <= 1.0 + epsilon, "T0 is not an isometry within epsilon");

  std::vector<Vec> images;
  for (const auto& A : T) images.push_back(A * exact_certificate(A, X, cod).primal);
  int size = 0;
  for (int s = N / 2; s >= 1 && size == 0; s /= 2) {
    bool ok = true;
    for (const auto& a : images) ok = ok && tail_mass(a, N - s, cod) < epsilon / 2.0;
    if (ok) size = s;
  }
  if (size == 0) throw Error("no dyadic suffix satisfies the tail rule");
  out.spec.I_size = size;
  out.spec.I_begin = N - size;
  out.spec.phi_slope = static_cast<double>(N) / size;

  const Mat raw = compression_matrix(N, size) * T0;
  const double scale = exact_norm(raw, X, cod);
  require(scale > 0.0, "compressed embedding vanished");
  out.G = raw / scale;
  std::vector<double> values;
  for (const auto& A : T) values.push_back(exact_norm(A + out.G, X, cod));
  out.report = check(std::move(values), 2.0 - 2.0 * epsilon);
  return out;
}

SupAltWitness sup_alt_witness(const NormedSpace& space, const std::vector<Vec>& family) {
  require(space.kind() == NormedSpace::Kind::Lp && space.is_linf_type(), "sup_alt_witness needs lp(inf, d)");
  require(!family.empty(), "family must be nonempty");
  SupAltWitness out;
  out.y = Vec::Zero(space.dim());
  double gap = 0.0;
  for (const auto& x : family) {
    require(x.size() == space.dim(), "family vector has the wrong dimension");
    require(std::abs(space.norm(x) - 1.0) <= kUnitTol, "family vectors must be unit");
    Eigen::Index c = 0;
    for (Eigen::Index i = 1; i < x.size(); ++i)
      if (std::abs(x[i]) > std::abs(x[c])) c = i;
    gap = std::max(gap, 1.0 - std::abs(x[c]));
    if (out.y[c] == 0.0) {
      out.y[c] = x[c] < 0.0 ? -1.0 : 1.0;
      out.coordinates.push_back(static_cast<int>(c));
    }
  }
  std::vector<double> values;
  for (const auto& x : family) values.push_back(std::max(space.norm(x + out.y), space.norm(x - out.y)));
  out.report = check(std::move(values), 2.0 - (gap + 1e-9));
  return out;
}

namespace {

std::vector<Vec> extreme_candidates(const NormedSpace& Y) {
  std::vector<Vec> out;
  if (Y.kind() == NormedSpace::Kind::Lp && Y.is_linf_type() && Y.dim() <= 10) {
    for (std::uint32_t bits = 0; bits < (1u << Y.dim()); ++bits) {
      Vec v(Y.dim());
      for (int c = 0; c < Y.dim(); ++c) v[c] = ((bits >> c) & 1u) ? -1.0 : 1.0;
      out.push_back(v);
    }
    return out;
  }
  for (int c = 0; c < Y.dim(); ++c) {
    out.push_back(Y.unit_basis(c));
    out.push_back(-Y.unit_basis(c));
  }
  return out;
}

}  // namespace

RankOneWitness rank_one_witness_search(const std::vector<Tensor>& T, const RankOneConfig& cfg) {
  require(!T.empty(), "tensor family must be nonempty");
  const NormedSpace& X = T.front().X;
  const NormedSpace& Y = T.front().Y;
  for (const auto& t : T) {
    require(t.X == X && t.Y == Y, "tensor family must share its spaces");
    require(std::abs(injective_value(t) - 1.0) <= kUnitTol, "family tensors must be unit");
  }
  constexpr int kEvaluationCap = 4000;
  int evaluations = 0;
  auto value = [&](const Vec& w, const Vec& z) {
    ++evaluations;
    const Mat S = w * z.transpose();
    double v = kInf;
    for (const auto& t : T) v = std::min(v, injective_value(Tensor(X, Y, t.coeffs + S)));
    return v;
  };

  RankOneWitness out{Tensor::zero(X, Y), {}, {}, {}, 0.0, {}, false, 0.0, false};
  // Stage-1 vectors C y_i* in X and the images C^T x_i* in Y.
  std::vector<Vec> stage1, images, norming;
  for (const auto& t : T) {
    const auto cert = injective_norm(t);
    norming.push_back(cert.dual);
    const Vec v = t.coeffs * cert.dual;
    const Vec u = t.coeffs.transpose() * cert.primal;
    stage1.push_back(v / X.norm(v));
    images.push_back(u / Y.norm(u));
  }
  std::vector<Vec> w_candidates;
  if (X.kind() == NormedSpace::Kind::Lp && X.is_linf_type()) {
    const auto alt = sup_alt_witness(X, stage1);
    out.stage1 = "sup-alt";
    out.stage1_min = alt.report.min_value();
    w_candidates.push_back(alt.y);
  } else {
    out.stage1 = "basis";
    for (int c = 0; c < X.dim(); ++c) w_candidates.push_back(X.unit_basis(c));
    w_candidates.insert(w_candidates.end(), stage1.begin(), stage1.end());
  }

  std::vector<Vec> z_candidates = extreme_candidates(Y);
  z_candidates.insert(z_candidates.end(), images.begin(), images.end());
  auto rng = stream(cfg.seed, 0x7a);
  for (int s = 0; s < cfg.starts; ++s) z_candidates.push_back(Y.random_unit(rng));

  double best = -kInf;
  for (const auto& w : w_candidates) {
    for (const auto& z : z_candidates) {
      const double v = value(w, z);
      if (v > best) {
        best = v;
        out.w = w;
        out.z = z;
      }
    }
  }
  // Coordinate refinement of z for the chosen w.
  for (double step = 0.25; step >= 1e-3 && !out.budget_exhausted; step *= 0.5) {
    bool improved = true;
    while (improved && !out.budget_exhausted) {
      improved = false;
      for (int c = 0; c < Y.dim() && !out.budget_exhausted; ++c) {
        for (double sg : {1.0, -1.0}) {
          Vec z = out.z + sg * step * Y.unit_basis(c);
          const double nz = Y.norm(z);
          if (nz <= 0.0) continue;
          z /= nz;
          const double v = value(out.w, z);
          if (v > best + 1e-12) {
            best = v;
            out.z = z;
            improved = true;
          }
          if (evaluations >= kEvaluationCap) out.budget_exhausted = true;
        }
      }
    }
  }
  out.S = Tensor(X, Y, out.w * out.z.transpose());
  std::vector<double> values;
  for (const auto& t : T) values.push_back(injective_value(Tensor(X, Y, t.coeffs + out.S.coeffs)));
  out.report = check(std::move(values), 2.0 - 5.0 * cfg.epsilon);
  out.alignment = kInf;
  double alt_min = kInf;
  for (std::size_t i = 0; i < T.size(); ++i) {
    const double plus = X.norm(stage1[i] + out.w), minus = X.norm(stage1[i] - out.w);
    const double s = plus >= minus ? 1.0 : -1.0;
    alt_min = std::min(alt_min, std::max(plus, minus));
    out.alignment = std::min(out.alignment, s * norming[i].dot(out.z));
  }
  if (out.stage1 == "basis") out.stage1_min = alt_min;
  out.applicable = out.stage1_min >= 2.0 - cfg.epsilon && out.alignment >= 1.0 - cfg.epsilon;
  return out;
}

bool Oplus1Extension::additive(double tol) const {
  return upper - lower <= tol && norm_zv >= lower - tol && norm_zv <= upper + tol;
}

Oplus1Extension oplus1_extension(const Tensor& z, const Vec& y, const ProjectiveOptions& opts) {
  require(z.X.kind() == NormedSpace::Kind::Lp && z.X.p() == 1.0, "z must live in lp(1, m) (x) Y");
  const NormedSpace& Y = z.Y;
  require(y.size() == Y.dim(), "y has the wrong dimension");
  require(std::abs(Y.norm(y) - 1.0) <= kUnitTol, "y must be a unit vector");
  const int m = z.rows();
  const NormedSpace X1 = NormedSpace::lp(1, m + 1);

  Oplus1Extension out{m,
                      m + 1,
                      y,
                      Y.norming_functional(y),
                      Tensor::rank_one(X1, Y, X1.unit_basis(m), y),
                      Tensor(X1, Y, pad_rows(z.coeffs, m + 1)),
                      {},
                      0.0,
                      0.0,
                      0.0,
                      0.0,
                      0.0,
                      0.0,
                      Exactness::Exact};

  const auto cz = projective_norm(z, opts);
  out.norm_z = cz.upper;
  out.norm_z_lower = cz.lower;
  out.T_bar = Mat::Zero(m + 1, Y.dim());
  out.T_bar.topRows(m) = cz.dual_operator;
  out.T_bar.row(m) = out.y_star.transpose();
  for (int a = 0; a <= m; ++a) out.T_bar_norm = std::max(out.T_bar_norm, Y.dual_norm(out.T_bar.row(a).transpose()));

  const Tensor sum(X1, Y, out.z_ext.coeffs + out.v.coeffs);
  out.lower = pairing(out.T_bar, sum) / out.T_bar_norm;
  out.upper = cz.upper + 1.0;
  const auto czv = projective_norm(sum, opts);
  out.norm_zv = czv.value;
  if (!cz.exact() || !czv.exact()) out.exactness = Exactness::Bounds;
  return out;
}

}  // namespace octa
