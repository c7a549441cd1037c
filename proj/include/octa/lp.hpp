#pragma once

#include "octa/common.hpp"

#include <string>

namespace octa::lp {

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(Status s);

/// min c^T x  s.t.  A x = b, x >= 0.  `duals` are the simplex multipliers y
/// (A^T y <= c at optimality, b^T y = c^T x).
struct StandardResult {
  Status status = Status::IterationLimit;
  double value = 0.0;
  Vec x;
  Vec duals;
};

StandardResult solve_standard(const Mat& A, const Vec& b, const Vec& c);

/// max c^T x  s.t.  A x <= b, x free.  `multipliers` (one per row of A) are
/// nonnegative with A^T multipliers = c and b^T multipliers = value; rows
/// with positive multipliers are the active constraints.
struct Result {
  Status status = Status::IterationLimit;
  double value = 0.0;
  Vec x;
  Vec multipliers;
};

Result maximize(const Vec& c, const Mat& A, const Vec& b);

inline constexpr double kFeasibilityTol = 1e-7;

}  // namespace octa::lp
