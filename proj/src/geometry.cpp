#include "stiefel/geometry.hpp"

#include "stiefel/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>
#include <string>

namespace stiefel {

namespace {

void require_shape(const Matrix& m, Eigen::Index n, Eigen::Index k, const char* what) {
  if (m.rows() != n || m.cols() != k) {
    throw ContractViolation(std::string(what) + ": expected " + std::to_string(n) + "x" +
                            std::to_string(k) + ", got " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
  }
}

void require_same_base(const StiefelPoint& a, const StiefelPoint& b, const char* what) {
  if (!a.same_as(b)) throw ContractViolation(std::string(what) + ": vectors live at different points");
}

// ||W^T X + X^T W||_F
double dual_condition(const Matrix& x, const Matrix& w) {
  const Matrix s = w.transpose() * x;
  return (s + s.transpose()).norm();
}

}  // namespace

double orthonormality_defect(const Matrix& x) {
  return (x.transpose() * x - Matrix::Identity(x.cols(), x.cols())).norm();
}

// ---------------------------------------------------------------------------

StiefelPoint::StiefelPoint(Matrix x) {
  if (x.rows() < 1 || x.cols() < 1 || x.cols() > x.rows()) {
    throw ContractViolation("StiefelPoint: need 1 <= k <= n, got " + std::to_string(x.rows()) + "x" +
                            std::to_string(x.cols()));
  }
  require_finite(x, "StiefelPoint");
  defect_ = orthonormality_defect(x);
  if (!(defect_ <= kInvariantTol)) {
    throw ContractViolation("StiefelPoint: columns are not orthonormal (||X^T X - I||_F = " +
                            std::to_string(defect_) + ")");
  }
  x_ = std::make_shared<const Matrix>(std::move(x));
}

bool StiefelPoint::same_as(const StiefelPoint& other) const {
  if (x_ == other.x_) return true;
  return x_->rows() == other.x_->rows() && x_->cols() == other.x_->cols() && *x_ == *other.x_;
}

// ---------------------------------------------------------------------------

DualTangentVector::DualTangentVector(StiefelPoint base, Matrix w)
    : base_(std::move(base)), w_(std::move(w)) {
  require_shape(w_, base_.n(), base_.k(), "DualTangentVector");
  require_finite(w_, "DualTangentVector");
  if (dual_condition(base_.matrix(), w_) > kInvariantTol * std::max(1.0, w_.norm())) {
    throw ContractViolation("DualTangentVector: W^T X + X^T W != 0");
  }
}

DualTangentVector::DualTangentVector(Trusted, StiefelPoint base, Matrix w)
    : base_(std::move(base)), w_(std::move(w)) {}

DualTangentVector DualTangentVector::zero(const StiefelPoint& base) {
  return DualTangentVector(Trusted{}, base, Matrix::Zero(base.n(), base.k()));
}

DualTangentVector DualTangentVector::scaled(double s) const {
  return DualTangentVector(Trusted{}, base_, s * w_);
}

TangentVector::TangentVector(StiefelPoint base, Matrix v) : base_(std::move(base)), v_(std::move(v)) {
  require_shape(v_, base_.n(), base_.k(), "TangentVector");
  require_finite(v_, "TangentVector");
  if (dual_condition(base_.matrix(), v_) > kInvariantTol * std::max(1.0, v_.norm())) {
    throw ContractViolation("TangentVector: V^T X + X^T V != 0");
  }
}

TangentVector::TangentVector(Trusted, StiefelPoint base, Matrix v)
    : base_(std::move(base)), v_(std::move(v)) {}

// ---------------------------------------------------------------------------

StiefelPoint random_point(Eigen::Index n, Eigen::Index k, std::uint64_t seed) {
  if (k < 1 || n < k) {
    throw ContractViolation("random_point: need 1 <= k <= n, got n=" + std::to_string(n) +
                            ", k=" + std::to_string(k));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(n, k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = normal(rng);
  return StiefelPoint(qr_thin(g).q);
}

DualTangentVector project_dual(const StiefelPoint& base, const Matrix& raw) {
  require_shape(raw, base.n(), base.k(), "project_dual");
  require_finite(raw, "project_dual");
  const Matrix& x = base.matrix();
  const Matrix s = x.transpose() * raw;
  Matrix w = raw - 0.5 * x * (s + s.transpose());
  return DualTangentVector(DualTangentVector::Trusted{}, base, std::move(w));
}

double metric(const TangentVector& y1, const TangentVector& y2) {
  require_same_base(y1.base(), y2.base(), "metric");
  const Matrix& x = y1.base().matrix();
  const Matrix a = x.transpose() * y1.matrix();
  const Matrix b = x.transpose() * y2.matrix();
  return (y1.matrix().array() * y2.matrix().array()).sum() - 0.5 * (a.array() * b.array()).sum();
}

double dual_metric(const DualTangentVector& w1, const DualTangentVector& w2) {
  require_same_base(w1.base(), w2.base(), "dual_metric");
  const Matrix& x = w1.base().matrix();
  const Matrix a = x.transpose() * w1.matrix();
  const Matrix b = x.transpose() * w2.matrix();
  return (w1.matrix().array() * w2.matrix().array()).sum() + (a.array() * b.array()).sum();
}

double dual_norm_squared(const DualTangentVector& w) {
  const Matrix a = w.base().matrix().transpose() * w.matrix();
  return w.matrix().squaredNorm() + a.squaredNorm();
}

TangentVector raise_indices(const DualTangentVector& w) {
  const Matrix& x = w.base().matrix();
  Matrix v = w.matrix() + x * (x.transpose() * w.matrix());
  return TangentVector(TangentVector::Trusted{}, w.base(), std::move(v));
}

DualTangentVector lower_indices(const TangentVector& v) {
  const Matrix& x = v.base().matrix();
  Matrix w = v.matrix() - 0.5 * x * (x.transpose() * v.matrix());
  return DualTangentVector(DualTangentVector::Trusted{}, v.base(), std::move(w));
}

// ---------------------------------------------------------------------------

CayleyCurve::CayleyCurve(StiefelPoint base, const Matrix& w) : base_(std::move(base)), w_(w) {
  require_shape(w_, base_.n(), base_.k(), "CayleyCurve");
  require_finite(w_, "CayleyCurve");
  const Matrix& x = base_.matrix();
  xtx_ = x.transpose() * x;
  xtw_ = x.transpose() * w_;
  wtw_ = w_.transpose() * w_;
}

StiefelPoint CayleyCurve::at(double scale) const {
  if (scale == 0.0) return base_;
  if (!std::isfinite(scale)) throw RetractionFailed("cayley_retract: non-finite step");

  const Eigen::Index k = base_.k();
  const double h = 0.5 * scale;

  // Z^T U with U = [h W, X], Z = [X, -h W], assembled from the cached Gram blocks.
  Matrix system(2 * k, 2 * k);
  system.topLeftCorner(k, k) = -h * xtw_;
  system.topRightCorner(k, k) = -xtx_;
  system.bottomLeftCorner(k, k) = h * h * wtw_;
  system.bottomRightCorner(k, k) = h * xtw_.transpose();
  system += Matrix::Identity(2 * k, 2 * k);  // I - Z^T U

  Matrix rhs(2 * k, k);  // Z^T X
  rhs.topRows(k) = xtx_;
  rhs.bottomRows(k) = -h * xtw_.transpose();

  Matrix m;
  try {
    m = solve_square(system, rhs);
  } catch (const SingularMatrix& e) {
    throw RetractionFailed(std::string("cayley_retract: ") + e.what());
  }

  // X + 2 U M = X + 2h W M_top + 2 X M_bottom
  const Matrix& x = base_.matrix();
  Matrix y = x + (2.0 * h) * (w_ * m.topRows(k)) + 2.0 * (x * m.bottomRows(k));
  if (!y.allFinite()) throw RetractionFailed("cayley_retract: non-finite result");
  try {
    return StiefelPoint(std::move(y));
  } catch (const ContractViolation& e) {
    throw RetractionFailed(std::string("cayley_retract: ") + e.what());
  }
}

StiefelPoint cayley_retract(const StiefelPoint& base, const DualTangentVector& w, double scale) {
  require_same_base(base, w.base(), "cayley_retract");
  return CayleyCurve(base, w.matrix()).at(scale);
}

StiefelPoint cayley_retract_raw(const StiefelPoint& base, const Matrix& w, double scale) {
  return cayley_retract(base, project_dual(base, w), scale);
}

StiefelPoint geodesic_retract(const StiefelPoint& base, const DualTangentVector& w, double t) {
  require_same_base(base, w.base(), "geodesic_retract");
  if (t == 0.0) return base;

  const Eigen::Index k = base.k();
  const Matrix& x = base.matrix();
  const Matrix& wm = w.matrix();

  Matrix u(base.n(), 2 * k);
  u << wm, x;
  Matrix z(base.n(), 2 * k);
  z << x, -wm;

  Matrix augmented = Matrix::Zero(4 * k, 4 * k);
  augmented.topLeftCorner(2 * k, 2 * k) = t * (z.transpose() * u);
  augmented.topRightCorner(2 * k, 2 * k) = t * Matrix::Identity(2 * k, 2 * k);
  const Matrix e = augmented.exp();
  const Matrix f = e.topRightCorner(2 * k, 2 * k);

  Matrix y = x + u * (f * (z.transpose() * x));
  return StiefelPoint(std::move(y));
}

DualTangentVector retract_inverse(const StiefelPoint& base, const StiefelPoint& target) {
  if (base.n() != target.n() || base.k() != target.k()) {
    throw ContractViolation("retract_inverse: points have different shapes");
  }
  const Matrix& x = base.matrix();
  const Matrix& y = target.matrix();
  const Eigen::Index k = base.k();

  // V = 2 Y M^{-1} with M = I + X^T Y, i.e. M^T V^T = 2 Y^T.
  const Matrix m = Matrix::Identity(k, k) + x.transpose() * y;
  Matrix vt;
  try {
    vt = solve_square(m.transpose(), 2.0 * y.transpose());
  } catch (const SingularMatrix& e) {
    throw InverseRetractionFailed(std::string("retract_inverse: ") + e.what());
  }
  return project_dual(base, vt.transpose());
}

StiefelPoint lerp(const StiefelPoint& base, const StiefelPoint& target, double alpha) {
  if (alpha == 0.0) return base;
  return cayley_retract(base, retract_inverse(base, target), alpha);
}

}  // namespace stiefel
