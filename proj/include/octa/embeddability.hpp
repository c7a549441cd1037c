#pragma once

#include "octa/common.hpp"
#include "octa/spaces.hpp"
#include "octa/tensor_norms.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace octa {

inline constexpr int kCutConePointLimit = 10;

/// Cut S is a subset of {1, ..., k-1} (point 0 is never in S), stored as a bitmask.
struct WeightedCut {
  std::uint32_t mask = 0;
  double weight = 0.0;
};

/// Either a nonnegative combination of cut semimetrics reconstructing D, or
/// evidence that none exists: the LP separator F (one value per pair i<j,
/// with sum F_ij delta_S(i,j) <= 0 for every cut and sum F_ij D_ij > 0), and
/// when found an integer vector b with sum b = 0 and
/// Q(b) = sum_{i<j} b_i b_j D_ij > 0 (a violated negative-type inequality).
struct CutConeCertificate {
  Mat D;
  bool feasible = false;
  std::vector<WeightedCut> cuts;
  Mat separator;  // symmetric, zero diagonal; empty when feasible
  std::optional<Eigen::VectorXi> negative_type;
  double negative_type_value = 0.0;
};

double cut_distance(std::uint32_t mask, int i, int j);

/// Pairwise distances of points in a normed space.
Mat distance_matrix(const NormedSpace& space, const std::vector<Vec>& points);

/// Checks symmetric, zero diagonal, nonnegative and triangle inequality.
void validate_metric(const Mat& D, double tol = 1e-9);

CutConeCertificate cut_cone_membership(const Mat& D);

/// sum_{i<j} b_i b_j D_ij
double negative_type_form(const Mat& D, const Vec& b);

/// Re-checks a certificate: feasible weights rebuild D within tol; an
/// infeasible separator is <= tol on every cut and > 0 on D.
bool verify_certificate(const CutConeCertificate& cert, double tol = 1e-6);

/// Minimal distortion t of an embedding of the finite metric into L1: the
/// LP min t s.t. D <= sum_S w_S delta_S <= t D, w >= 0.
double l1_distortion_bound(const Mat& D);

struct ConfigSearchResult {
  std::vector<Vec> points;
  double distortion = 1.0;
  int evaluations = 0;
  std::string label() const { return distortion > 1.0 + 1e-9 ? "non-embeddable configuration" : "inconclusive"; }
};

/// Seeded random plus local-perturbation search for k unit vectors whose
/// distance matrix has the largest L1 distortion. A result of 1 is only a
/// search outcome, never evidence of embeddability.
ConfigSearchResult point_config_search(const NormedSpace& space, int k, int budget, std::uint64_t seed = 1);

struct NonOctaConfig {
  int search_budget = 10000;
  int search_points = 8;
  int modulus_budget = 20000;
  int net_budget = 2000;
  std::uint64_t seed = 1;
  /// Reuse an earlier search for lp(p*, n) instead of running a new one.
  std::optional<ConfigSearchResult> search;
};

struct NonOctaCertificate {
  double p = 0.0;
  int n = 0;
  int m = 0;
  double nu = 0.0;
  double eta = 0.0;
  double delta_hat = 0.0;  ///< modulus estimate at eta before discounting
  double delta0 = 0.0;     ///< 0.9 * delta_hat
  double eps0 = 0.0;       ///< distortion lower bound minus one
  ConfigSearchResult search;
  CutConeCertificate evidence;
  SphereNet net;
  std::vector<Vec> attaining;  ///< y_i in S_{lp(p,n)} with f_i(y_i) = 1
  Vec x;                       ///< unit vector of lp(1,m)
  std::vector<Tensor> family;  ///< y_i (x) x stored with first factor lp(1,m)
};

/// nu grid, largest first.
const std::vector<double>& nu_grid();

NonOctaCertificate non_octa_certificate(double p, int n, int m, const NonOctaConfig& cfg = {});

/// Parameter chain of a certificate: (1+nu)/(1-3nu) < 1+eps0, eta < nu/2,
/// delta0 < nu/2, each with slack >= `slack`.
bool parameter_chain_holds(const NonOctaCertificate& c, double slack = 1e-9);

/// ||(a,b)|| ~ sum_j w_j |a cos t_j + b sin t_j| on the angle grid t_j = j pi / grid.
struct LevyRepresentation {
  NormedSpace space;
  int grid = 0;
  Vec weights;
  double fit_error = 0.0;   ///< max |fit - 1| over the test directions
  double distortion = 1.0;  ///< measured on a dense direction sample

  /// Embedding into wl1(grid): row j is grid * w_j (cos t_j, sin t_j).
  Mat embedding() const;
};

inline constexpr int kLevyTestDirections = 360;
inline constexpr int kLevyMaxGrid = 1024;

LevyRepresentation levy_embedding_2d(const NormedSpace& space, int grid, double tol);

std::string format_cut_cone(const CutConeCertificate& cert);

}  // namespace octa
