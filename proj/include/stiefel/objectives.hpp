#pragma once

// Weighted quadratic test objectives on S_{n,k}:
//
//   f(X) = 1/2 sum_i alpha_i <X_i, A X_i>
//
// (the Brockett cost; k = 1 with alpha = (1) is the Rayleigh quotient on the
// sphere), together with the condition numbers of their minimizers.

#include "stiefel/geometry.hpp"
#include "stiefel/linalg.hpp"

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace stiefel {

/// Something that can be minimized over S_{n,k}.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual Eigen::Index n() const = 0;
  virtual Eigen::Index k() const = 0;

  virtual double value(const StiefelPoint& x) const = 0;

  /// The gradient as an element of the dual tangent space at x.
  virtual DualTangentVector gradient(const StiefelPoint& x) const = 0;

  struct Evaluation {
    double value;
    DualTangentVector gradient;
  };

  /// Value and gradient together. The default calls value() and gradient().
  virtual Evaluation evaluate(const StiefelPoint& x) const { return {value(x), gradient(x)}; }
};

/// Diagonal symmetric operator A = diag(values).
struct DiagonalOperator {
  Vector values;
};

/// Dense symmetric operator.
struct DenseOperator {
  Matrix a;
};

using SymmetricOperator = std::variant<DiagonalOperator, DenseOperator>;

/// The Brockett cost with operator A and strictly increasing positive weights.
class BrockettObjective final : public Objective {
 public:
  /// Throws ContractViolation if the weights are not 0 < a_1 < ... < a_k, if a
  /// dense operator is not symmetric to 1e-12 relative, or if k > n.
  BrockettObjective(SymmetricOperator op, Vector weights);

  /// Rayleigh quotient 1/2 x^T A x on the unit sphere.
  static BrockettObjective sphere(SymmetricOperator op);

  Eigen::Index n() const override { return n_; }
  Eigen::Index k() const override { return weights_.size(); }
  const Vector& weights() const { return weights_; }
  const SymmetricOperator& op() const { return op_; }

  double value(const StiefelPoint& x) const override;
  DualTangentVector gradient(const StiefelPoint& x) const override;
  Evaluation evaluate(const StiefelPoint& x) const override;

  /// A X for an n x m block.
  Matrix apply(const Matrix& x) const;

 private:
  void check(const StiefelPoint& x) const;

  SymmetricOperator op_;
  Vector weights_;
  Eigen::Index n_;
};

/// Ascending eigenvalues lambda_1 <= ... <= lambda_n.
class SpectrumInfo {
 public:
  /// Throws ContractViolation if `eigenvalues` is empty, non-finite or not ascending.
  explicit SpectrumInfo(std::vector<double> eigenvalues);

  const std::vector<double>& eigenvalues() const { return values_; }
  std::size_t size() const { return values_.size(); }
  /// 1-based access, lambda(1) is the smallest eigenvalue.
  double lambda(std::size_t i) const { return values_.at(i - 1); }

  Vector as_vector() const;

 private:
  std::vector<double> values_;
};

/// kappa = (lambda_n - lambda_1) / (lambda_2 - lambda_1).
double sphere_condition_number(const SpectrumInfo& spectrum);

/// kappa = alpha_k (lambda_n - lambda_1) /
///         min{ alpha_1 (lambda_{k+1} - lambda_k),
///              min_{i<k} (lambda_{k-i+1} - lambda_{k-i}) (alpha_{i+1} - alpha_i) }.
double brockett_condition_number(const SpectrumInfo& spectrum, const Vector& weights);

/// Weights minimizing brockett_condition_number for the given spectrum,
///   alpha_i = sum_{j=1}^{i} 1 / (lambda_{k-j+2} - lambda_{k-j+1}),
/// so that every gap term in the denominator equals one.
Vector optimal_weights(const SpectrumInfo& spectrum, Eigen::Index k);

/// (lambda_n - lambda_1) sum_{i=1}^{k} 1 / (lambda_{i+1} - lambda_i).
double optimal_condition_number(const SpectrumInfo& spectrum, Eigen::Index k);

/// Minimum of the Brockett cost: the largest weight goes with the smallest
/// eigenvalue, 1/2 sum_i alpha_i lambda_{k+1-i}.
double known_minimum(const SpectrumInfo& spectrum, const Vector& weights);

/// Parses `linear:n` (lambda_i = i), `quadratic:n` (lambda_i = i^2 / n) or
/// `file:<path>` (newline-separated ascending reals). Throws ParseError.
SpectrumInfo parse_spectrum(std::string_view specifier);

}  // namespace stiefel
