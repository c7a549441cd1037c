#pragma once

#include "octa/common.hpp"

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace octa {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A finite-dimensional normed space: lp(p, n) for p in [1, inf], a weighted
/// l1 norm sum_c w_c |x_c| (discretized L1 when w_c = 1/N), or the weighted
/// sup norm max_c |x_c| / w_c that is its dual.
class NormedSpace {
 public:
  enum class Kind { Lp, WeightedL1, WeightedLinf };

  static NormedSpace lp(double p, int n);
  static NormedSpace weighted_l1(std::vector<double> weights);
  static NormedSpace weighted_linf(std::vector<double> weights);
  /// Uniform grid on [0,1]: wl1 with N cells of weight 1/N.
  static NormedSpace discretized_l1(int cells);
  /// Parses `lp:<p>:<n>` (p may be `inf`) or `wl1:<w1,...,wN>`.
  static NormedSpace parse(std::string_view text);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  /// Exponent for Lp; 1 for WeightedL1 and inf for WeightedLinf.
  double p() const { return p_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Norm is sum_c w_c |x_c| with w_c > 0 (lp(1,n) has w = 1).
  bool is_l1_type() const { return p_ == 1.0; }
  /// Norm is max_c |x_c| / w_c.
  bool is_linf_type() const { return p_ == kInf; }
  bool is_hilbert() const { return kind_ == Kind::Lp && p_ == 2.0; }

  NormedSpace dual() const;

  double norm(const Vec& x) const;
  double dual_norm(const Vec& f) const { return dual().norm(f); }

  /// Unit functional f in the dual with f(x) = 1 for a unit x. Ties are
  /// broken lexicographically: zero entries get sign +1 in the l1 case and
  /// the first coordinate attaining the max is used in the sup case.
  Vec norming_functional(const Vec& x) const;

  /// Weight of coordinate c in the l1/linf forms (1 for Lp).
  double weight(int c) const { return weights_.empty() ? 1.0 : weights_[static_cast<std::size_t>(c)]; }

  /// Unit vector along coordinate c.
  Vec unit_basis(int c) const;

  /// Gaussian direction normalized in this norm.
  Vec random_unit(std::mt19937_64& rng) const;

  std::string to_string() const;

  friend bool operator==(const NormedSpace& a, const NormedSpace& b) {
    return a.kind_ == b.kind_ && a.dim_ == b.dim_ && a.p_ == b.p_ && a.weights_ == b.weights_;
  }

 private:
  NormedSpace(Kind kind, int dim, double p, std::vector<double> weights)
      : kind_(kind), dim_(dim), p_(p), weights_(std::move(weights)) {}

  void check_dim(const Vec& x) const;

  Kind kind_;
  int dim_;
  double p_;
  std::vector<double> weights_;
};

/// Conjugate exponent p* with 1/p + 1/p* = 1.
double conjugate_exponent(double p);

enum class ModulusMethod { ClosedFormHilbert, Optimization };

/// Upper estimate of the modulus of uniform convexity
/// delta(eps) = inf{ 1 - ||(f+g)/2|| : f, g in B, ||f - g|| >= eps }.
struct ConvexityModulusEstimate {
  double epsilon = 0.0;
  double delta_hat = 0.0;
  ModulusMethod method = ModulusMethod::Optimization;
  int budget = 0;
};

ConvexityModulusEstimate uniform_convexity_modulus(const NormedSpace& space, double epsilon, int budget,
                                                   std::uint64_t seed = 1);

/// Estimates on a shared grid of epsilons (ascending). Every grid point sees the
/// same sampled directions, and the estimates are tightened from the right so
/// the profile is nondecreasing.
std::vector<ConvexityModulusEstimate> uniform_convexity_profile(const NormedSpace& space,
                                                                const std::vector<double>& epsilons, int budget,
                                                                std::uint64_t seed = 1);

struct SphereNet {
  NormedSpace space = NormedSpace::lp(2, 1);
  double nu = 0.0;
  std::vector<Vec> points;
};

inline constexpr int kNetDimensionLimit = 6;
inline constexpr int kNetRepairSamples = 10000;

/// Greedy nu-net of the unit sphere: seeded unit samples are added while
/// they are farther than nu from every chosen point; stops after `budget`
/// consecutive rejections, then repaired until kNetRepairSamples fresh
/// samples are all covered. `seeds` are inserted first (normalized).
SphereNet sphere_net(const NormedSpace& space, double nu, int budget, std::uint64_t seed = 1,
                     const std::vector<Vec>& seeds = {});

/// Largest distance from `samples` seeded unit vectors to the net.
double net_covering_radius(const SphereNet& net, int samples, std::uint64_t seed = 2);

/// Plain-text vector I/O: one line of space-separated decimals.
Vec parse_vector(std::string_view line);
std::string format_vector(const Vec& v);

}  // namespace octa
