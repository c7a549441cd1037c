#pragma once

#include "octa/common.hpp"
#include "octa/embeddability.hpp"
#include "octa/spaces.hpp"
#include "octa/tensor_norms.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace octa {

/// Per-member values of a witness against the bound it must meet.
struct WitnessCheck {
  std::vector<double> values;
  double bound = 0.0;
  bool passed = false;

  double min_value() const;
};

/// Zero-pads A (rows = codomain coordinates) to `rows` rows.
Mat pad_rows(const Mat& A, int rows);

/// Embedding psi : X -> lp(1, d) given as a d x dim X matrix, with the ratio
/// spread max/min of ||psi x||_1 / ||x|| measured on a sphere net.
struct L1Embedding {
  Mat psi;
  double distortion = 1.0;
};

/// Measures the distortion of psi on a nu = 0.1 sphere net of X (nu = 0.25
/// above dimension 3).
double embedding_distortion(const NormedSpace& X, const Mat& psi);

/// LP fit ||x|| ~ sum_j w_j |<theta_j, x>| over the rows theta_j of
/// `directions`; zero weights are dropped and psi is scaled to norm one.
L1Embedding fit_l1_embedding(const NormedSpace& X, const Mat& directions);

/// Fixed direction sequence: coordinate axes, then sign patterns with a
/// leading +1, then seeded Gaussian directions, `count` rows in total.
Mat default_directions(int dim, int count, std::uint64_t seed = 1);

/// psi for a Levy representation: rows w_j (cos t_j, sin t_j) with w_j > 0.
Mat psi_from_levy(const LevyRepresentation& rep);

struct ShiftWitnessSpec {
  Mat psi;
  double psi_distortion = 1.0;
  int k = 0;           ///< truncation index; S lands on coordinates k, k+1, ...
  int output_dim = 0;  ///< max(m, k + d)
};

struct ShiftOptions {
  int codomain_budget = 256;
  std::optional<int> k;  ///< overrides the tail rule
};

struct ShiftWitness {
  Mat S;                   ///< output_dim x dim X, unit norm
  std::vector<Mat> padded;  ///< the T_i zero-padded to output_dim rows
  ShiftWitnessSpec spec;
  WitnessCheck report;     ///< ||T_i + S|| against 2 - 5 eps
};

/// Shift construction for norm-one T_i : X -> lp(1, m): S = phi_k P_k psi,
/// normalized, with k the first index where the tails of T_i x_i and
/// psi x_i (x_i norming T_i) are below eps.
ShiftWitness shift_witness(const std::vector<Mat>& T, const NormedSpace& X, const Mat& psi, double epsilon,
                           const ShiftOptions& opts = {});

struct IntervalWitnessSpec {
  int grid_N = 0;
  int I_begin = 0;  ///< first cell of the dyadic suffix I
  int I_size = 0;
  double phi_slope = 0.0;  ///< N / |I|
  double t0_distortion = 1.0;
};

struct IntervalWitness {
  Mat G;  ///< N x dim X, unit norm
  IntervalWitnessSpec spec;
  WitnessCheck report;  ///< ||T_i + G|| against 2 - 2 eps
};

/// Compression S_I of wl1(N): cell N - |I| + r receives (N / |I|) times the
/// mean of block r of N / |I| cells.
Mat compression_matrix(int N, int I_size);

/// Interval construction for norm-one T_i : X -> wl1(N) given an isometry
/// T0 : X -> wl1(N): G = S_I T0 for the largest dyadic suffix I whose tail
/// mass is below eps / 2 for every T_i x_i.
IntervalWitness interval_witness(const std::vector<Mat>& T, const NormedSpace& X, const Mat& T0, double epsilon);

struct SupAltWitness {
  Vec y;
  std::vector<int> coordinates;  ///< distinct attaining coordinates, in order
  WitnessCheck report;           ///< max ||x_i +- y|| against 2 - tol
};

/// y = sum_j sigma_j e_{i_j} over the coordinates where the x_i attain their
/// sup norm (first max), each sign taken from the first x_i using it.
SupAltWitness sup_alt_witness(const NormedSpace& space, const std::vector<Vec>& family);

struct RankOneConfig {
  int starts = 8;
  std::uint64_t seed = 1;
  double epsilon = 0.05;
};

struct RankOneWitness {
  Tensor S = Tensor::zero(NormedSpace::lp(1, 1), NormedSpace::lp(1, 1));
  Vec w;
  Vec z;
  std::string stage1;     ///< "sup-alt" or "basis"
  double stage1_min = 0;  ///< min_i max ||v_i +- w|| over the stage-1 vectors
  WitnessCheck report;    ///< ||T_i + w (x) z||_eps against 2 - 5 eps
  bool budget_exhausted = false;
  /// min_i s_i y_i*(z), s_i the better sign of ||C_i y_i* +- w||.
  double alignment = 0.0;
  /// The bound is guaranteed when stage1_min >= 2 - eps and alignment >= 1 - eps.
  bool applicable = false;
};

/// Two-stage search for S = w (x) z in X (x)_eps Y: w from sup_alt_witness on
/// the vectors C y_i* (y_i* norming the images), then z over extreme points
/// and seeded starts of S_Y.
RankOneWitness rank_one_witness_search(const std::vector<Tensor>& T, const RankOneConfig& cfg = {});

struct Oplus1Extension {
  int base_dim = 0;
  int witness_index = 0;  ///< 1-based coordinate of the new l1 direction
  Vec y;
  Vec y_star;
  Tensor v;      ///< e_{m+1} (x) y
  Tensor z_ext;  ///< z padded into lp(1, m+1) (x) Y
  Mat T_bar;     ///< rows: optimal T for z, then y*
  double T_bar_norm = 0.0;
  double norm_z = 0.0;       ///< upper value of ||z||_pi
  double norm_z_lower = 0.0;
  double norm_zv = 0.0;      ///< cutting-plane value of ||z + v||_pi
  double lower = 0.0;        ///< pairing(T_bar, z + v) / ||T_bar||
  double upper = 0.0;        ///< ||z||_pi + 1
  Exactness exactness = Exactness::Exact;
  bool additive(double tol) const;
};

/// v = e_{m+1} (x) y for z in lp(1,m) (x) Y, with the dual witness
/// T_bar(x + lambda e_{m+1}) = T x + lambda y*.
Oplus1Extension oplus1_extension(const Tensor& z, const Vec& y, const ProjectiveOptions& opts = {});

}  // namespace octa
