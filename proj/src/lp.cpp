#include "octa/lp.hpp"

#include "octa/random.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace octa::lp {

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal:
      return "optimal";
    case Status::Infeasible:
      return "infeasible";
    case Status::Unbounded:
      return "unbounded";
    case Status::IterationLimit:
      return "iteration-limit";
  }
  return "?";
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kHarrisTol = 1e-9;
constexpr int kReinvertEvery = 40;

// Dense tableau over [F A | I] (F flips rows so the rhs is nonnegative and
// the artificial identity is a feasible start). Rows 0..m-1 are constraints;
// row m holds reduced costs with the negated objective in the rhs column.
// The working rhs is perturbed by tiny distinct amounts to avoid degenerate
// stalls; restore_rhs() switches to the exact rhs at the end.
class Tableau {
 public:
  Tableau(const Mat& A, const Vec& b)
      : m_(A.rows()), n_(A.cols()), orig_(m_, n_ + m_), exact_rhs_(m_), work_rhs_(m_), t_(m_ + 1, n_ + m_ + 1),
        basis_(static_cast<std::size_t>(m_)), flip_(m_), cost_(Vec::Zero(n_ + m_)) {
    orig_.setZero();
    const double scale = 1.0 + (m_ ? b.cwiseAbs().maxCoeff() : 0.0);
    for (Eigen::Index i = 0; i < m_; ++i) {
      flip_[i] = b[i] < 0.0 ? -1.0 : 1.0;
      orig_.row(i).head(n_) = flip_[i] * A.row(i);
      orig_(i, n_ + i) = 1.0;
      exact_rhs_[i] = flip_[i] * b[i];
      const double jitter = static_cast<double>(mix64(static_cast<std::uint64_t>(i)) >> 11) * 0x1.0p-53;
      work_rhs_[i] = exact_rhs_[i] + scale * 1e-10 * (1.0 + jitter);
      basis_[static_cast<std::size_t>(i)] = n_ + i;
    }
    reinvert(work_rhs_);
  }

  Eigen::Index rhs() const { return n_ + m_; }

  void set_costs(const Vec& full_cost) {
    cost_ = full_cost;
    refresh_costs();
  }

  // Runs primal simplex. Columns >= allowed never enter.
  Status run(Eigen::Index allowed) {
    const long max_iter = 100 * (m_ + n_) + 1000;
    long stall = 0;
    double last_obj = t_(m_, rhs());
    for (long it = 0; it < max_iter; ++it) {
      if (it > 0 && it % kReinvertEvery == 0) reinvert(work_rhs_);
      const bool bland = stall > 2 * m_ + 20;
      Eigen::Index enter = -1;
      double best = -kPivotTol;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (is_basic(j)) continue;
        const double r = t_(m_, j);
        if (r < best) {
          enter = j;
          if (bland) break;
          best = r;
        }
      }
      if (enter < 0) {
        reinvert(work_rhs_);
        if (!any_entering(allowed)) return Status::Optimal;
        continue;
      }
      const Eigen::Index leave = bland ? ratio_bland(enter) : ratio_harris(enter);
      if (leave < 0) return Status::Unbounded;
      pivot(leave, enter);

      const double obj = t_(m_, rhs());
      if (obj > last_obj + 1e-13 * (1.0 + std::abs(last_obj))) {
        stall = 0;
        last_obj = obj;
      } else {
        ++stall;
      }
    }
    return Status::IterationLimit;
  }

  // Dual simplex with the exact rhs; reduced costs stay nonnegative.
  Status restore_rhs(Eigen::Index allowed) {
    reinvert(exact_rhs_);
    const double tol = 1e-11 * (1.0 + exact_rhs_.cwiseAbs().maxCoeff());
    for (long it = 0; it < 50 * (m_ + n_) + 100; ++it) {
      if (it > 0 && it % kReinvertEvery == 0) reinvert(exact_rhs_);
      Eigen::Index row = -1;
      double worst = -tol;
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (t_(i, rhs()) < worst) {
          worst = t_(i, rhs());
          row = i;
        }
      }
      if (row < 0) {
        for (Eigen::Index i = 0; i < m_; ++i) t_(i, rhs()) = std::max(0.0, t_(i, rhs()));
        return Status::Optimal;
      }
      Eigen::Index col = -1;
      double ratio = std::numeric_limits<double>::infinity();
      double piv = 0.0;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (is_basic(j)) continue;
        const double a = t_(row, j);
        if (a < -kPivotTol) {
          const double q = std::max(0.0, t_(m_, j)) / -a;
          if (q < ratio - 1e-12 || (q <= ratio + 1e-12 && -a > piv)) {
            ratio = std::min(ratio, q);
            col = j;
            piv = -a;
          }
        }
      }
      if (col < 0) return Status::Infeasible;
      pivot(row, col);
    }
    return Status::IterationLimit;
  }

  // Moves artificial variables out of the basis where possible.
  void expel_artificials() {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < n_) continue;
      Eigen::Index col = -1;
      double best = 1e-7;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (!is_basic(j) && std::abs(t_(i, j)) > best) {
          best = std::abs(t_(i, j));
          col = j;
        }
      }
      if (col >= 0) pivot(i, col);
    }
    reinvert(work_rhs_);
  }

  double objective() const { return -t_(m_, rhs()); }

  Vec primal() const {
    Vec x = Vec::Zero(n_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const auto j = basis_[static_cast<std::size_t>(i)];
      if (j < n_) x[j] = t_(i, rhs());
    }
    return x;
  }

  // y = B^{-T} c_B in the original row orientation.
  Vec duals() const {
    const Vec y = basis_lu().transpose().solve(basic_costs());
    return y.cwiseProduct(flip_);
  }

 private:
  bool is_basic(Eigen::Index j) const { return std::find(basis_.begin(), basis_.end(), j) != basis_.end(); }

  bool any_entering(Eigen::Index allowed) const {
    for (Eigen::Index j = 0; j < allowed; ++j)
      if (!is_basic(j) && t_(m_, j) < -kPivotTol) return true;
    return false;
  }

  Vec basic_costs() const {
    Vec cb(m_);
    for (Eigen::Index i = 0; i < m_; ++i) cb[i] = cost_[basis_[static_cast<std::size_t>(i)]];
    return cb;
  }

  Eigen::PartialPivLU<Mat> basis_lu() const {
    Mat B(m_, m_);
    for (Eigen::Index i = 0; i < m_; ++i) B.col(i) = orig_.col(basis_[static_cast<std::size_t>(i)]);
    return Eigen::PartialPivLU<Mat>(B);
  }

  // Rebuilds the tableau from the original data and the current basis.
  void reinvert(const Vec& rhs_vec) {
    if (m_ == 0) return;
    const auto lu = basis_lu();
    t_.topLeftCorner(m_, n_ + m_) = lu.solve(orig_);
    t_.col(rhs()).head(m_) = lu.solve(rhs_vec);
    for (Eigen::Index i = 0; i < m_; ++i) {
      // Basic columns are exact unit vectors.
      t_.col(basis_[static_cast<std::size_t>(i)]).head(m_).setZero();
      t_(i, basis_[static_cast<std::size_t>(i)]) = 1.0;
    }
    refresh_costs();
  }

  void refresh_costs() {
    t_.row(m_).setZero();
    t_.row(m_).head(n_ + m_) = cost_.transpose();
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double cb = cost_[basis_[static_cast<std::size_t>(i)]];
      if (cb != 0.0) t_.row(m_) -= cb * t_.row(i);
    }
  }

  Eigen::Index ratio_bland(Eigen::Index enter) const {
    Eigen::Index leave = -1;
    double ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double a = t_(i, enter);
      if (a <= kPivotTol) continue;
      const double q = std::max(0.0, t_(i, rhs())) / a;
      if (q < ratio - 1e-14 || (q <= ratio + 1e-14 && leave >= 0 &&
                                basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
        ratio = std::min(ratio, q);
        leave = i;
      }
    }
    return leave;
  }

  // Two-pass Harris test: bound the step with a small feasibility slack, then
  // take the largest pivot among rows within that bound.
  Eigen::Index ratio_harris(Eigen::Index enter) const {
    double bound = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double a = t_(i, enter);
      if (a > kPivotTol) bound = std::min(bound, (std::max(0.0, t_(i, rhs())) + kHarrisTol) / a);
    }
    if (!std::isfinite(bound)) return -1;
    Eigen::Index leave = -1;
    double piv = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double a = t_(i, enter);
      if (a > kPivotTol && std::max(0.0, t_(i, rhs())) / a <= bound && a > piv) {
        piv = a;
        leave = i;
      }
    }
    return leave;
  }

  void pivot(Eigen::Index row, Eigen::Index col) {
    t_.row(row) /= t_(row, col);
    for (Eigen::Index i = 0; i <= m_; ++i) {
      if (i == row) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(row);
    }
    if (t_(row, rhs()) < 0.0) t_(row, rhs()) = 0.0;
    basis_[static_cast<std::size_t>(row)] = col;
  }

  Eigen::Index m_, n_;
  Mat orig_;
  Vec exact_rhs_, work_rhs_;
  Mat t_;
  std::vector<Eigen::Index> basis_;
  Vec flip_;
  Vec cost_;
};

}  // namespace

StandardResult solve_standard(const Mat& A, const Vec& b, const Vec& c) {
  require(A.rows() == b.size() && A.cols() == c.size(), "LP shape mismatch");
  require(A.allFinite() && b.allFinite() && c.allFinite(), "LP data must be finite");
  const Eigen::Index m = A.rows(), n = A.cols();
  StandardResult out;
  Tableau tab(A, b);

  Vec phase1 = Vec::Zero(n + m);
  phase1.tail(m).setOnes();
  tab.set_costs(phase1);
  Status s = tab.run(n + m);
  if (s != Status::Optimal) {
    out.status = Status::IterationLimit;
    return out;
  }
  const double scale = 1.0 + b.cwiseAbs().sum();
  if (tab.objective() > kFeasibilityTol * scale) {
    out.status = Status::Infeasible;
    // Phase-1 multipliers: A^T y <= 0 and b^T y > 0 (Farkas).
    out.duals = tab.duals();
    return out;
  }
  tab.expel_artificials();

  Vec phase2 = Vec::Zero(n + m);
  phase2.head(n) = c;
  tab.set_costs(phase2);
  s = tab.run(n);
  if (s == Status::Optimal) s = tab.restore_rhs(n);
  out.status = s;
  if (s != Status::Optimal) return out;
  out.x = tab.primal();
  out.value = c.dot(out.x);
  out.duals = tab.duals();
  return out;
}

Result maximize(const Vec& c, const Mat& A, const Vec& b) {
  require(A.cols() == c.size() && A.rows() == b.size(), "LP shape mismatch");
  // Dual pair: min b^T y s.t. A^T y = c, y >= 0.
  const StandardResult d = solve_standard(A.transpose(), c, b);
  Result out;
  switch (d.status) {
    case Status::Optimal:
      out.status = Status::Optimal;
      out.value = d.value;
      out.x = d.duals;
      out.multipliers = d.x;
      break;
    case Status::Infeasible:
      out.status = Status::Unbounded;
      break;
    case Status::Unbounded:
      out.status = Status::Infeasible;
      break;
    case Status::IterationLimit:
      out.status = Status::IterationLimit;
      break;
  }
  return out;
}

}  // namespace octa::lp
