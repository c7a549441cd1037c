#include "doctest.h"

#include "octa/embeddability.hpp"
#include "octa/random.hpp"

#include <cmath>

using namespace octa;

namespace {

Mat k23() {
  Mat D(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) D(i, j) = i == j ? 0.0 : ((i < 2) == (j < 2) ? 2.0 : 1.0);
  return D;
}

// Random 4-point metric: shortest paths over random positive edge lengths.
Mat random_metric(int k, std::mt19937_64& rng) {
  Mat D(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) D(i, j) = D(j, i) = i == j ? 0.0 : 0.1 + uniform01(rng);
  for (int t = 0; t < k; ++t)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) D(i, j) = std::min(D(i, j), D(i, t) + D(t, j));
  return D;
}

}  // namespace

TEST_CASE("cut cone: three points of lp(1,2)") {
  const auto X = NormedSpace::lp(1, 2);
  const Mat D = distance_matrix(X, {Vec::Zero(2), Vec::Unit(2, 0), Vec::Unit(2, 1)});
  Mat expected(3, 3);
  expected << 0, 1, 1, 1, 0, 2, 1, 2, 0;
  CHECK(D == expected);
  const auto c = cut_cone_membership(D);
  REQUIRE(c.feasible);
  REQUIRE(c.cuts.size() == 2);
  // Bit i marks point i; cut {2} is the second point alone.
  CHECK(c.cuts[0].mask == 2u);
  CHECK(c.cuts[0].weight == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.cuts[1].mask == 4u);
  CHECK(c.cuts[1].weight == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(verify_certificate(c));
  CHECK(l1_distortion_bound(D) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cut cone: K23 is not L1-embeddable") {
  const Mat D = k23();
  Vec b(5);
  b << 3, 3, -2, -2, -2;
  CHECK(negative_type_form(D, b) == 6.0);
  const auto c = cut_cone_membership(D);
  CHECK_FALSE(c.feasible);
  CHECK(verify_certificate(c));
  REQUIRE(c.negative_type.has_value());
  CHECK(c.negative_type_value > 0.0);
  CHECK(negative_type_form(D, c.negative_type->cast<double>()) == c.negative_type_value);
  CHECK(c.negative_type->sum() == 0);
  // Minimal distortion of K23 into L1.
  CHECK(l1_distortion_bound(D) == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("cut cone: every 4-point metric embeds") {
  auto rng = stream(71, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Mat D = random_metric(4, rng);
    const auto c = cut_cone_membership(D);
    CHECK(c.feasible);
    CHECK(verify_certificate(c));
    CHECK(l1_distortion_bound(D) == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("distortion agrees with membership") {
  auto rng = stream(73, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 5 + trial % 3;
    const Mat D = random_metric(k, rng);
    const auto c = cut_cone_membership(D);
    CHECK(verify_certificate(c));
    const double t = l1_distortion_bound(D);
    CHECK(t >= 1.0 - 1e-9);
    CHECK(c.feasible == (t <= 1.0 + 1e-7));
  }
}

TEST_CASE("configurations in lp(1,3) and lp(2,3) embed") {
  for (double q : {1.0, 2.0}) {
    const auto X = NormedSpace::lp(q, 3);
    for (int trial = 0; trial < 1000; ++trial) {
      auto rng = stream(79, static_cast<std::uint64_t>(trial));
      std::vector<Vec> pts;
      for (int i = 0; i < 6; ++i) pts.push_back(X.random_unit(rng));
      CHECK(cut_cone_membership(distance_matrix(X, pts)).feasible);
    }
  }
  const auto l2 = point_config_search(NormedSpace::lp(2, 3), 6, 200);
  CHECK(l2.distortion == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(l2.label() == "inconclusive");
  CHECK(point_config_search(NormedSpace::lp(1, 3), 6, 200).distortion == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("cut cone errors") {
  CHECK_THROWS_AS(cut_cone_membership(Mat::Zero(11, 11)), Error);
  Mat bad(3, 3);
  bad << 0, 1, 5, 1, 0, 1, 5, 1, 0;
  CHECK_THROWS_AS(cut_cone_membership(bad), Error);
  CHECK_THROWS_AS(point_config_search(NormedSpace::lp(4, 3), 6, 0), Error);
}

TEST_CASE("certificate needs an obstruction") {
  NonOctaConfig cfg;
  cfg.search_budget = 50;
  CHECK_THROWS_WITH_AS(non_octa_certificate(2.0, 3, 8, cfg), "obstruction not established", Error);
}

TEST_CASE("certificate parameter chain from a supplied obstruction") {
  // A configuration on S of lp(4,3) with distortion well above 1.
  ConfigSearchResult s;
  s.distortion = 1.5;
  s.points = {Vec::Unit(3, 0), Vec::Unit(3, 1), -Vec::Unit(3, 2)};
  NonOctaConfig cfg;
  cfg.search = s;
  const auto c = non_octa_certificate(4.0 / 3.0, 3, 2, cfg);
  // (1+nu)/(1-3nu) < 1.5 first holds on the grid at nu = 0.05.
  CHECK(c.nu == 0.05);
  CHECK(c.eta == 0.0125);
  CHECK(parameter_chain_holds(c));
  CHECK(c.delta0 > 0.0);
  CHECK(c.delta0 == doctest::Approx(0.9 * c.delta_hat).epsilon(1e-15));
  CHECK(c.family.size() == c.net.points.size());
  for (std::size_t i = 0; i < c.family.size(); i += 7)
    CHECK(injective_value(c.family[i]) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Levy representation examples") {
  const auto l1 = levy_embedding_2d(NormedSpace::lp(1, 2), 64, 1e-6);
  CHECK(l1.weights[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(l1.weights[32] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(l1.weights.sum() == doctest::Approx(2.0).epsilon(1e-5));

  const auto linf = levy_embedding_2d(NormedSpace::lp(kInf, 2), 64, 1e-6);
  CHECK(linf.weights[16] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-5));
  CHECK(linf.weights[48] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-5));

  for (const auto& X : {NormedSpace::lp(2, 2), NormedSpace::lp(3, 2), NormedSpace::lp(1.5, 2)}) {
    const double tol = 0.01;
    const auto rep = levy_embedding_2d(X, 64, tol);
    CHECK(rep.fit_error <= tol);
    CHECK(rep.weights.minCoeff() >= 0.0);
    CHECK(rep.distortion <= 1.0 + 2.0 * tol);
  }
  CHECK_THROWS_AS(levy_embedding_2d(NormedSpace::lp(2, 3), 64, 0.01), Error);
  CHECK_THROWS_AS(levy_embedding_2d(NormedSpace::lp(2, 2), 16, 0.01), Error);
}
