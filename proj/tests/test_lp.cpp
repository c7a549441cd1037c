#include "doctest.h"

#include "octa/lp.hpp"

using namespace octa;

TEST_CASE("maximize over a box with a diagonal cut") {
  // max x + y s.t. x <= 1, y <= 1, x + y <= 1.5, -x <= 0, -y <= 0
  Mat A(5, 2);
  A << 1, 0, 0, 1, 1, 1, -1, 0, 0, -1;
  Vec b(5);
  b << 1, 1, 1.5, 0, 0;
  Vec c(2);
  c << 1, 1;
  const auto r = lp::maximize(c, A, b);
  REQUIRE(r.status == lp::Status::Optimal);
  CHECK(r.value == doctest::Approx(1.5));
  CHECK((A * r.x - b).maxCoeff() <= 1e-9);
  CHECK((A.transpose() * r.multipliers - c).norm() <= 1e-9);
  CHECK(r.multipliers.minCoeff() >= 0.0);
  CHECK(b.dot(r.multipliers) == doctest::Approx(1.5));
}

TEST_CASE("unbounded and infeasible") {
  Mat A(1, 2);
  A << 1, 0;
  Vec b(1);
  b << 1;
  Vec c(2);
  c << 0, 1;
  CHECK(lp::maximize(c, A, b).status == lp::Status::Unbounded);

  Mat B(2, 1);
  B << 1, -1;
  Vec d(2);
  d << -1, 0;  // x <= -1 and x >= 0
  Vec e(1);
  e << 1;
  CHECK(lp::maximize(e, B, d).status == lp::Status::Infeasible);
}

TEST_CASE("standard form with Farkas certificate") {
  // x1 + x2 = -1 with x >= 0 is infeasible.
  Mat A(1, 2);
  A << 1, 1;
  Vec b(1);
  b << -1;
  Vec c = Vec::Zero(2);
  const auto r = lp::solve_standard(A, b, c);
  REQUIRE(r.status == lp::Status::Infeasible);
  CHECK((A.transpose() * r.duals).maxCoeff() <= 1e-12);
  CHECK(b.dot(r.duals) > 0.0);
}

TEST_CASE("degenerate transportation problem") {
  // 2x2 transportation with equal supplies/demands (degenerate vertices).
  Mat A(4, 4);
  A << 1, 1, 0, 0,  //
      0, 0, 1, 1,   //
      1, 0, 1, 0,   //
      0, 1, 0, 1;
  Vec b(4);
  b << 1, 1, 1, 1;
  Vec c(4);
  c << 1, 2, 3, 1;
  const auto r = lp::solve_standard(A, b, c);
  REQUIRE(r.status == lp::Status::Optimal);
  CHECK(r.value == doctest::Approx(2.0));
  CHECK((A * r.x - b).norm() <= 1e-9);
  CHECK(b.dot(r.duals) == doctest::Approx(2.0));
  CHECK((A.transpose() * r.duals - c).maxCoeff() <= 1e-9);
}
