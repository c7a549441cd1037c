#include "doctest.h"

#include "octa/random.hpp"
#include "octa/witnesses.hpp"

#include <cmath>

using namespace octa;

namespace {

Mat mat(int r, int c, std::initializer_list<double> xs) {
  Mat M(r, c);
  auto it = xs.begin();
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = *it++;
  return M;
}

Mat gaussian_matrix(int r, int c, std::mt19937_64& rng) {
  Mat M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = gaussian(rng);
  return M;
}

double exact(const Mat& A, const NormedSpace& dom, const NormedSpace& cod) {
  OperatorNormOptions o;
  o.require_exact = true;
  return operator_norm(A, dom, cod, o).value;
}

Mat normalized(const Mat& A, const NormedSpace& dom, const NormedSpace& cod) { return A / exact(A, dom, cod); }

Tensor unit_tensor(const NormedSpace& X, const NormedSpace& Y, std::mt19937_64& rng) {
  const Mat C = gaussian_matrix(X.dim(), Y.dim(), rng);
  return Tensor(X, Y, C / injective_value(Tensor(X, Y, C)));
}

}  // namespace

TEST_CASE("zero padding is isometric") {
  auto rng = stream(5, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat A = gaussian_matrix(4, 2, rng);
    for (const auto& X : {NormedSpace::lp(1, 2), NormedSpace::lp(2, 2), NormedSpace::lp(kInf, 2)}) {
      CHECK(exact(A, X, NormedSpace::lp(1, 4)) == exact(pad_rows(A, 7), X, NormedSpace::lp(1, 7)));
    }
  }
  CHECK_THROWS_AS(pad_rows(Mat::Zero(3, 1), 2), Error);
}

TEST_CASE("shift witness: identity on lp(1,2)") {
  const auto X = NormedSpace::lp(1, 2);
  const Mat T = Mat::Identity(2, 2);
  ShiftOptions o;
  o.k = 2;
  const auto w = shift_witness({T}, X, Mat::Identity(2, 2), 1e-9, o);
  CHECK(w.spec.output_dim == 4);
  CHECK(w.S.isApprox(mat(4, 2, {0, 0, 0, 0, 1, 0, 0, 1})));
  CHECK(w.report.values[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(w.report.passed);

  const auto automatic = shift_witness({T}, X, Mat::Identity(2, 2), 1e-9);
  CHECK(automatic.spec.k == 1);
  CHECK(automatic.report.values[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("shift witness: random operators into lp(1,4)") {
  const auto X = NormedSpace::lp(1, 2), cod = NormedSpace::lp(1, 4);
  auto rng = stream(11, 0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Mat> T;
    for (int i = 0; i < 2; ++i) T.push_back(normalized(gaussian_matrix(4, 2, rng), X, cod));
    const auto w = shift_witness(T, X, Mat::Identity(2, 2), 0.05);
    CHECK(w.report.passed);
    CHECK(w.report.min_value() >= 1.75);
    CHECK(exact(w.S, X, NormedSpace::lp(1, w.spec.output_dim)) == doctest::Approx(1.0).epsilon(1e-12));
    // Re-evaluate the report independently.
    for (std::size_t i = 0; i < T.size(); ++i)
      CHECK(exact(w.padded[i] + w.S, X, NormedSpace::lp(1, w.spec.output_dim)) ==
            doctest::Approx(w.report.values[i]).epsilon(1e-12));
  }
}

TEST_CASE("shift witness: output mass beyond k") {
  const double eps = 0.05;
  const auto X = NormedSpace::lp(1, 2);
  Mat T = Mat::Zero(4, 2);
  T(0, 0) = 1.0 - eps / 2.0;
  T(1, 0) = eps / 2.0;
  const auto w = shift_witness({T}, X, Mat::Identity(2, 2), eps);
  CHECK(w.spec.k == 1);
  CHECK(w.report.min_value() >= 2.0 - 5.0 * eps);
  CHECK(w.report.passed);
}

TEST_CASE("shift witness: Levy embedding of lp(2,2)") {
  const auto X = NormedSpace::lp(2, 2);
  const auto rep = levy_embedding_2d(X, 64, 0.01);
  const Mat psi = psi_from_levy(rep);
  CHECK(embedding_distortion(X, psi) <= 1.02 + 1e-9);
  auto rng = stream(13, 0);
  std::vector<Mat> T;
  for (int i = 0; i < 3; ++i) T.push_back(normalized(gaussian_matrix(6, 2, rng), X, NormedSpace::lp(1, 6)));
  const auto w = shift_witness(T, X, psi, 0.05);
  CHECK(w.report.passed);
}

TEST_CASE("shift witness errors") {
  const auto X = NormedSpace::lp(1, 2);
  CHECK_THROWS_WITH_AS(shift_witness({2.0 * Mat::Identity(2, 2)}, X, Mat::Identity(2, 2), 0.05),
                       "operators must have norm one", Error);
  CHECK_THROWS_WITH_AS(shift_witness({Mat::Identity(2, 2) / std::sqrt(2.0)}, NormedSpace::lp(2, 2), Mat::Identity(2, 2), 0.05),
                       "psi distortion exceeds 1 + epsilon", Error);
  ShiftOptions tight;
  tight.codomain_budget = 2;
  CHECK_THROWS_WITH_AS(shift_witness({Mat::Identity(2, 2)}, X, Mat::Identity(2, 2), 1e-9, tight),
                       "increase codomain budget", Error);
}

TEST_CASE("embedding fit") {
  const auto l1 = NormedSpace::lp(1, 3);
  const auto fit = fit_l1_embedding(l1, default_directions(3, 7));
  CHECK(fit.distortion == doctest::Approx(1.0).epsilon(1e-9));
  const auto l15 = NormedSpace::lp(1.5, 3);
  const auto rough = fit_l1_embedding(l15, default_directions(3, 13));
  CHECK(rough.distortion < 1.15);
  CHECK(exact(rough.psi, l15, NormedSpace::lp(1, static_cast<int>(rough.psi.rows()))) ==
        doctest::Approx(1.0).epsilon(1e-9));
  const Mat D = default_directions(2, 5);
  CHECK(D.row(0).isApprox(Vec::Unit(2, 0).transpose()));
  CHECK(D.row(2).isApprox(Vec::Constant(2, std::sqrt(0.5)).transpose()));
}

TEST_CASE("interval witness: hand example") {
  const auto X = NormedSpace::lp(1, 1);
  const Mat T = mat(4, 1, {4, 0, 0, 0});
  const Mat T0 = Mat::Ones(4, 1);
  const auto w = interval_witness({T}, X, T0, 0.1);
  CHECK(w.spec.I_begin == 2);
  CHECK(w.spec.I_size == 2);
  CHECK(w.spec.phi_slope == 2.0);
  CHECK(w.G.isApprox(mat(4, 1, {0, 0, 2, 2})));
  CHECK(w.report.values[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("interval witness: leaked mass") {
  const auto X = NormedSpace::lp(1, 1);
  const auto w = interval_witness({mat(4, 1, {3.8, 0.2, 0, 0})}, X, Mat::Ones(4, 1), 0.1);
  CHECK(w.report.min_value() >= 1.8);
  CHECK(w.report.passed);
}

TEST_CASE("interval witness: disjoint heads on wl1(8)") {
  const auto X = NormedSpace::lp(1, 2);
  Mat T1 = Mat::Zero(8, 2), T2 = Mat::Zero(8, 2), T0 = Mat::Zero(8, 2);
  T1(0, 0) = 8.0;
  T1(1, 1) = 8.0;
  T2(2, 0) = 8.0;
  T2(3, 1) = -8.0;
  for (int c = 0; c < 4; ++c) {
    T0(c, 0) = 2.0;
    T0(c + 4, 1) = 2.0;
  }
  const auto w = interval_witness({T1, T2}, X, T0, 0.1);
  CHECK(w.spec.I_size == 4);
  CHECK(w.report.passed);
  for (double v : w.report.values) CHECK(v >= 1.8);
  CHECK(exact(w.G, X, NormedSpace::discretized_l1(8)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("compression is isometric on block-constant functions") {
  const auto L = NormedSpace::discretized_l1(16);
  auto rng = stream(17, 0);
  for (int trial = 0; trial < 50; ++trial) {
    Vec f(16);
    for (int b = 0; b < 4; ++b) f.segment(4 * b, 4).setConstant(gaussian(rng));
    for (int s : {4, 8}) CHECK(L.norm(compression_matrix(16, s) * f) == doctest::Approx(L.norm(f)).epsilon(1e-12));
  }
}

TEST_CASE("interval witness errors") {
  const auto X = NormedSpace::lp(1, 1);
  CHECK_THROWS_AS(interval_witness({mat(3, 1, {3, 0, 0})}, X, Mat::Ones(3, 1), 0.1), Error);
  CHECK_THROWS_WITH_AS(interval_witness({mat(4, 1, {0, 0, 0, 4})}, X, Mat::Ones(4, 1), 0.1),
                       "no dyadic suffix satisfies the tail rule", Error);
}

TEST_CASE("sup-alt witness examples") {
  const auto l3 = NormedSpace::lp(kInf, 3);
  Vec a(3), b(3);
  a << 1, 0, 0;
  b << -1, 0.5, 0;
  auto w = sup_alt_witness(l3, {a, b});
  CHECK(w.y.isApprox(Vec::Unit(3, 0)));
  for (double v : w.report.values) CHECK(v == 2.0);

  w = sup_alt_witness(l3, {Vec::Unit(3, 0), Vec::Unit(3, 1)});
  CHECK(w.y.isApprox(Vec::Unit(3, 0) + Vec::Unit(3, 1)));
  for (double v : w.report.values) CHECK(v == 2.0);

  const auto l8 = NormedSpace::lp(kInf, 8);
  auto rng = stream(19, 0);
  std::vector<Vec> fam;
  for (int i = 0; i < 5; ++i) fam.push_back(l8.random_unit(rng));
  w = sup_alt_witness(l8, fam);
  CHECK(l8.norm(w.y) == 1.0);
  CHECK(w.report.min_value() >= 2.0 - 1e-9);
  CHECK(w.report.passed);

  CHECK_THROWS_AS(sup_alt_witness(NormedSpace::lp(2, 3), {a}), Error);
}

TEST_CASE("rank-one witness examples") {
  const auto l1 = NormedSpace::lp(1, 2);
  const auto T = Tensor::rank_one(l1, l1, l1.unit_basis(0), l1.unit_basis(0));
  auto w = rank_one_witness_search({T});
  CHECK(w.stage1 == "basis");
  CHECK(w.report.min_value() == doctest::Approx(2.0).epsilon(1e-12));
  // The identity-shaped completion e2 (x) e2 is among the optimal witnesses.
  CHECK(injective_value(Tensor(l1, l1, T.coeffs + Mat(mat(2, 2, {0, 0, 0, 1})))) == doctest::Approx(2.0));

  const auto X = NormedSpace::lp(2, 3), Y = NormedSpace::lp(3, 2);
  Vec x(3), y(2);
  x << 0.6, 0.0, 0.8;
  y << 1.0, 0.0;
  w = rank_one_witness_search({Tensor::rank_one(X, Y, x, y)});
  CHECK(w.report.min_value() == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("rank-one witness on lp(inf,4) (x) lp(1,4)") {
  const auto X = NormedSpace::lp(kInf, 4), Y = NormedSpace::lp(1, 4);
  auto rng = stream(23, 0);
  std::vector<Tensor> fam;
  for (int i = 0; i < 3; ++i) fam.push_back(unit_tensor(X, Y, rng));
  const auto w = rank_one_witness_search(fam);
  CHECK(w.stage1 == "sup-alt");
  CHECK(w.stage1_min >= 2.0 - 1e-9);
  CHECK(w.report.min_value() >= 1.9);
  CHECK(injective_value(w.S) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("oplus1 extension examples") {
  const auto l1 = NormedSpace::lp(1, 2), l2 = NormedSpace::lp(2, 2);
  const auto z = Tensor::rank_one(l1, l2, l1.unit_basis(0), l2.unit_basis(0));
  auto e = oplus1_extension(z, l2.unit_basis(0));
  CHECK(e.witness_index == 3);
  CHECK(e.norm_zv == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(e.additive(1e-7));
  CHECK(e.T_bar_norm <= 1.0 + 1e-9);

  e = oplus1_extension(Tensor::zero(l1, l2), l2.unit_basis(1));
  CHECK(e.norm_zv == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(oplus1_extension(z, 2.0 * l2.unit_basis(0)), Error);
  CHECK_THROWS_AS(oplus1_extension(Tensor::zero(l2, l2), l2.unit_basis(0)), Error);
}

TEST_CASE("oplus1 additivity on seeded tensors") {
  int idx = 0;
  for (const auto& Y : {NormedSpace::lp(2, 2), NormedSpace::lp(1, 3), NormedSpace::lp(kInf, 3), NormedSpace::lp(3, 2)}) {
    for (int m = 1; m <= 3; ++m) {
      const auto X = NormedSpace::lp(1, m);
      for (int trial = 0; trial < 25; ++trial) {
        auto rng = stream(29, static_cast<std::uint64_t>(idx++));
        const Mat C = gaussian_matrix(m, Y.dim(), rng);
        const Tensor z(X, Y, C / projective_norm(Tensor(X, Y, C)).value);
        const auto e = oplus1_extension(z, Y.random_unit(rng));
        CHECK(e.exactness == Exactness::Exact);
        CHECK(e.additive(1e-5));
        CHECK(e.norm_zv == doctest::Approx(e.norm_z + 1.0).epsilon(1e-5));
      }
    }
  }
}
