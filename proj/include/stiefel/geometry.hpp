#pragma once

// Geometry of the Stiefel manifold S_{n,k} = { X in R^{n x k} : X^T X = I }
// under the canonical (quotient) metric.
//
// Gradients and momentum directions live in the dual tangent space
//   (T_X)^* = { W : W^T X + X^T W = 0 },
// paired with tangent vectors through the Frobenius product. The metric is
//   g(Y, Z)  = Tr(Y^T (I - X X^T / 2) Z)
// and its dual
//   g*(Y, Z) = Tr(Y^T (I + X X^T) Z).

#include "stiefel/linalg.hpp"

#include <cstdint>
#include <memory>

namespace stiefel {

/// Tolerance used by the type invariants. Freshly computed quantities are
/// typically accurate to ~1e-14; this leaves room for accumulated drift.
inline constexpr double kInvariantTol = 1e-8;

/// ||X^T X - I||_F.
double orthonormality_defect(const Matrix& x);

/// A point on S_{n,k}. Immutable; copies share storage.
class StiefelPoint {
 public:
  /// Validates ||x^T x - I||_F <= kInvariantTol; throws ContractViolation otherwise.
  explicit StiefelPoint(Matrix x);

  const Matrix& matrix() const { return *x_; }
  Eigen::Index n() const { return x_->rows(); }
  Eigen::Index k() const { return x_->cols(); }

  /// ||X^T X - I||_F, measured when the point was constructed.
  double defect() const { return defect_; }

  /// True if both points refer to the same matrix (identical storage or equal entries).
  bool same_as(const StiefelPoint& other) const;

 private:
  std::shared_ptr<const Matrix> x_;
  double defect_ = 0.0;
};

class TangentVector;

/// A dual tangent vector W at `base`: W^T X + X^T W = 0.
class DualTangentVector {
 public:
  /// Validates the dual tangent condition (relative to max(1, ||w||_F)).
  DualTangentVector(StiefelPoint base, Matrix w);

  /// The zero vector at `base`.
  static DualTangentVector zero(const StiefelPoint& base);

  const Matrix& matrix() const { return w_; }
  const StiefelPoint& base() const { return base_; }

  DualTangentVector scaled(double s) const;

 private:
  struct Trusted {};
  DualTangentVector(Trusted, StiefelPoint base, Matrix w);

  StiefelPoint base_;
  Matrix w_;

  friend DualTangentVector project_dual(const StiefelPoint&, const Matrix&);
  friend DualTangentVector lower_indices(const TangentVector&);
};

/// A tangent vector V at `base`: V^T X + X^T V = 0.
class TangentVector {
 public:
  TangentVector(StiefelPoint base, Matrix v);

  const Matrix& matrix() const { return v_; }
  const StiefelPoint& base() const { return base_; }

 private:
  struct Trusted {};
  TangentVector(Trusted, StiefelPoint base, Matrix v);

  StiefelPoint base_;
  Matrix v_;

  friend TangentVector raise_indices(const DualTangentVector&);
};

/// Uniformly distributed random point: sign-fixed thin QR of an n x k Gaussian matrix.
StiefelPoint random_point(Eigen::Index n, Eigen::Index k, std::uint64_t seed);

/// Orthogonal projection onto (T_X)^*: W - X (W^T X + X^T W) / 2.
DualTangentVector project_dual(const StiefelPoint& base, const Matrix& raw);

/// Canonical metric g on tangent vectors.
double metric(const TangentVector& y1, const TangentVector& y2);

/// Dual metric g* on dual tangent vectors.
double dual_metric(const DualTangentVector& w1, const DualTangentVector& w2);

/// ||w||_{g*}^2 = ||W||_F^2 + ||X^T W||_F^2.
double dual_norm_squared(const DualTangentVector& w);

/// phi_g(W) = (I + X X^T) W.
TangentVector raise_indices(const DualTangentVector& w);

/// phi_g^{-1}(V) = (I - X X^T / 2) V.
DualTangentVector lower_indices(const TangentVector& v);

/// The Cayley curve s -> R_1(X, phi_g(s W)) through a fixed base point and
/// direction. The Gram matrices X^T X, X^T W, W^T W are formed once, so each
/// evaluation costs O(n k^2) plus one 2k x 2k solve. Line searches evaluate
/// the same curve at many step sizes.
class CayleyCurve {
 public:
  CayleyCurve(StiefelPoint base, const Matrix& w);

  /// R_1(X, phi_g(s W)) = X + 2 U (I - Z^T U)^{-1} Z^T X with
  /// U = [s W / 2, X], Z = [X, -s W / 2].
  /// Throws RetractionFailed if the 2k x 2k system is singular.
  StiefelPoint at(double scale) const;

  const StiefelPoint& base() const { return base_; }

 private:
  StiefelPoint base_;
  Matrix w_;
  Matrix xtx_;
  Matrix xtw_;
  Matrix wtw_;
};

/// Cayley retraction of the scaled dual vector: R_1(X, phi_g(scale * W)).
StiefelPoint cayley_retract(const StiefelPoint& base, const DualTangentVector& w, double scale);

/// Same, for an arbitrary n x k matrix which is first projected onto (T_X)^*.
StiefelPoint cayley_retract_raw(const StiefelPoint& base, const Matrix& w, double scale);

/// Canonical geodesic X(t) = exp(t (W X^T - X W^T)) X.
/// With A = U Z^T, U = [W, X], Z = [X, -W], the exponential is reduced to
/// exp(tA) X = X + U F Z^T X where F is the top-right block of
/// exp([[t Z^T U, t I], [0, 0]]), a 4k x 4k matrix.
StiefelPoint geodesic_retract(const StiefelPoint& base, const DualTangentVector& w, double t);

/// The dual vector V at `base` with cayley_retract(base, V, 1) == target:
/// the projection of 2 Y (I + X^T Y)^{-1} onto (T_X)^*.
/// Throws InverseRetractionFailed if I + X^T Y is singular.
DualTangentVector retract_inverse(const StiefelPoint& base, const StiefelPoint& target);

/// (1 - alpha) X + alpha Y on the manifold: R_1(X, phi_g(alpha V)) with V from
/// retract_inverse. alpha outside [0, 1] extrapolates.
StiefelPoint lerp(const StiefelPoint& base, const StiefelPoint& target, double alpha);

}  // namespace stiefel
