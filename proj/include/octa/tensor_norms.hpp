#pragma once

#include "octa/common.hpp"
#include "octa/spaces.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace octa {

/// u = sum_ij coeffs(i, j) e_i (x) e_j in X (x) Y; coeffs is dim X by dim Y.
struct Tensor {
  NormedSpace X;
  NormedSpace Y;
  Mat coeffs;

  Tensor(NormedSpace x_space, NormedSpace y_space, Mat c);

  static Tensor zero(const NormedSpace& x_space, const NormedSpace& y_space);
  static Tensor rank_one(const NormedSpace& x_space, const NormedSpace& y_space, const Vec& x, const Vec& y);

  int rows() const { return X.dim(); }
  int cols() const { return Y.dim(); }
};

enum class Exactness { Exact, Bounds };

struct RankOneTerm {
  double weight = 0.0;
  Vec x;
  Vec y;
};

/// A computed norm with bounds and re-checkable witnesses.
///
/// operator_norm: `primal` is a unit domain vector with ||A primal|| = lower,
/// `dual` a unit functional on the codomain with dual(A primal) = lower.
/// injective_norm: `primal` in S_{X*}, `dual` in S_{Y*}, primal^T C dual = lower.
/// projective_norm: `decomposition` reconstructs the tensor with
/// sum of weights = upper, `dual_operator` is a norm-<=1 map X -> Y* with
/// pairing = lower.
struct NormCertificate {
  double value = 0.0;
  Exactness exactness = Exactness::Exact;
  double lower = 0.0;
  double upper = 0.0;
  Vec primal;
  Vec dual;
  std::vector<RankOneTerm> decomposition;
  Mat dual_operator;
  std::string route;
  int cuts = 0;

  double gap() const { return upper - lower; }
  bool exact() const { return exactness == Exactness::Exact; }
};

inline constexpr int kSignEnumerationLimit = 24;

enum class OperatorRoute {
  Auto,         ///< cheapest exact route, else bounds
  SignGray,     ///< force Gray-code sign enumeration (codomain l1-type)
  SignCells,    ///< force hyperplane-arrangement cell enumeration (codomain l1-type)
  Alternating,  ///< force the bounds-only alternating maximization
};

struct OperatorNormOptions {
  int budget = 16;           ///< alternating-maximization starts
  std::uint64_t seed = 1;
  bool require_exact = false;
  OperatorRoute route = OperatorRoute::Auto;
};

/// Norm of x -> A x from `dom` to `cod`; A is cod.dim() by dom.dim().
NormCertificate operator_norm(const Mat& A, const NormedSpace& dom, const NormedSpace& cod,
                              const OperatorNormOptions& opts = {});

/// True when operator_norm can return an exact value for these spaces/sizes.
bool operator_norm_is_exact(const NormedSpace& dom, const NormedSpace& cod);

/// Injective norm: the norm of the associated map X* -> Y (equivalently
/// Y* -> X; the orientation with the cheaper exact route is used).
NormCertificate injective_norm(const Tensor& u, const OperatorNormOptions& opts = {});

/// Value-only injective norm for inner loops.
double injective_value(const Tensor& u);

struct ProjectiveOptions {
  double tol = 1e-8;
  int max_cuts = 2000;
  OperatorNormOptions separation{};
};

/// Projective norm by cutting planes on the dual ball of L(X, Y*).
NormCertificate projective_norm(const Tensor& u, const ProjectiveOptions& opts = {});

/// Trace duality <T, u> = sum_ij T(i,j) u(i,j), T read as a map X -> Y*.
double pairing(const Mat& T, const Tensor& u);

/// Matrix text format: first line `m n`, then m lines of n decimals.
Mat read_matrix(std::istream& in);
Mat read_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const Mat& M);

/// Flat key-value block (value, exactness, bounds, gap, witness lines).
std::string format_certificate(const NormCertificate& cert);

}  // namespace octa
