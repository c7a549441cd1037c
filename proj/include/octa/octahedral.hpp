#pragma once

#include "octa/common.hpp"
#include "octa/spaces.hpp"
#include "octa/tensor_norms.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace octa {

enum class DefectMode { Octa, Alt };
std::string to_string(DefectMode mode);

enum class TensorNormKind { Injective, Projective };

/// X (x)_eps Y or X (x)_pi Y.
struct TensorSpace {
  NormedSpace X;
  NormedSpace Y;
  TensorNormKind kind = TensorNormKind::Injective;

  double norm(const Mat& coeffs) const;
};

/// A candidate witness with the tag of the construction that produced it.
struct WitnessCandidate {
  Vec y;  ///< for tensor spaces: coefficients flattened column-major
  std::string source;
};

struct DefectConfig {
  int starts = 8;        ///< seeded random ascent starts
  double grid = 1e-3;    ///< ascent stops once the step falls below this
  std::uint64_t seed = 1;
  int max_sweeps = 60;   ///< per start
  bool ascend_pool = true;  ///< also ascend from the best pool candidate
  bool use_witnesses = true;
  std::vector<WitnessCandidate> extra;
};

struct DefectProvenance {
  std::uint64_t seed = 0;
  int starts = 0;
  double grid = 0.0;
  int candidates = 0;
};

/// Optimizer estimate of sup_{y in S} min_i ||x_i + y|| (octa) or
/// sup_y min_i max ||x_i +- y|| (alt). Always a lower bound of the sup.
struct DefectReport {
  DefectMode mode = DefectMode::Octa;
  std::vector<Vec> family;  ///< flattened column-major for tensor spaces
  Vec witness;
  double defect = 0.0;
  std::string source;
  DefectProvenance provenance;
  std::optional<TensorSpace> tensor;

  static constexpr const char* kLabel = "lower-bound estimate";
  Tensor witness_tensor() const;
};

Vec flatten(const Mat& coeffs);
Mat unflatten(const Vec& v, int rows, int cols);

/// min_i ||x_i + y|| or min_i max ||x_i +- y|| for a single y.
double defect_objective(const NormedSpace& space, const std::vector<Vec>& family, const Vec& y, DefectMode mode);
double defect_objective(const TensorSpace& space, const std::vector<Tensor>& family, const Tensor& y,
                        DefectMode mode);

DefectReport family_defect(const NormedSpace& space, const std::vector<Vec>& family, const DefectConfig& cfg = {});
DefectReport alt_family_defect(const NormedSpace& space, const std::vector<Vec>& family,
                               const DefectConfig& cfg = {});
DefectReport family_defect(const TensorSpace& space, const std::vector<Tensor>& family, const DefectConfig& cfg = {});
DefectReport alt_family_defect(const TensorSpace& space, const std::vector<Tensor>& family,
                               const DefectConfig& cfg = {});

/// Certified upper bound for a 2-dimensional space: the objective is
/// 1-Lipschitz, and on a 2-dimensional sphere every point of the arc between
/// consecutive grid points lies within their chord of one of them, so
/// max over the grid + max chord bounds the sup.
struct DefectUpperBound {
  double upper = 0.0;
  double grid_max = 0.0;
  double max_chord = 0.0;
  int points = 0;
};
DefectUpperBound defect_upper_bound_2d(const NormedSpace& space, const std::vector<Vec>& family, DefectMode mode,
                                       double resolution);

struct DichotomyConfig {
  DefectConfig defect{};
  int families = 2;  ///< seeded families per m
  std::uint64_t seed = 1;
  /// Explicit family (m0 x n coefficient matrices for lp(1,m0) (x) lp(p,n),
  /// unit in the injective norm) used instead of seeded ones.
  std::optional<std::vector<Mat>> family;
};

struct DichotomyRow {
  int m = 0;
  double mean_defect = 0.0;
  double max_defect = 0.0;
  std::string source;  ///< shift, rank-one or generic (of the max row)
  std::vector<DefectReport> reports;
};

/// Defects of k-families in lp(1,m) (x)_eps lp(p,n) for each m. Families are
/// supported on the first min(m_list) coordinates and zero-padded, so every
/// larger m sees the same family; the best witness of the previous m is
/// carried over as a candidate and the estimates are nondecreasing in m.
std::vector<DichotomyRow> dichotomy_scan(double p, int n, const std::vector<int>& m_list, int k,
                                         const DichotomyConfig& cfg = {});

/// Coefficient matrices of a seeded unit k-family in lp(1,m) (x)_eps lp(p,n).
std::vector<Mat> seeded_tensor_family(double p, int n, int m, int k, std::uint64_t seed);

}  // namespace octa
