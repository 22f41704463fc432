#include "stiefel/objectives.hpp"

#include "stiefel/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

namespace stiefel {

namespace {

Eigen::Index operator_size(const SymmetricOperator& op) {
  return std::visit(
      [](const auto& o) -> Eigen::Index {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, DiagonalOperator>) {
          return o.values.size();
        } else {
          return o.a.rows();
        }
      },
      op);
}

}  // namespace

BrockettObjective::BrockettObjective(SymmetricOperator op, Vector weights)
    : op_(std::move(op)), weights_(std::move(weights)), n_(operator_size(op_)) {
  if (auto* dense = std::get_if<DenseOperator>(&op_)) {
    require_finite(dense->a, "BrockettObjective");
    if (dense->a.rows() != dense->a.cols()) {
      throw ContractViolation("BrockettObjective: dense operator must be square");
    }
    if ((dense->a - dense->a.transpose()).norm() > 1e-12 * dense->a.norm()) {
      throw ContractViolation("BrockettObjective: dense operator is not symmetric");
    }
  } else {
    const auto& d = std::get<DiagonalOperator>(op_);
    if (!d.values.allFinite()) throw ContractViolation("BrockettObjective: non-finite diagonal");
  }
  if (n_ < 1) throw ContractViolation("BrockettObjective: empty operator");
  if (weights_.size() < 1 || weights_.size() > n_) {
    throw ContractViolation("BrockettObjective: need 1 <= k <= n weights");
  }
  if (!(weights_(0) > 0.0)) throw ContractViolation("BrockettObjective: weights must be positive");
  for (Eigen::Index i = 1; i < weights_.size(); ++i) {
    if (!(weights_(i) > weights_(i - 1))) {
      throw ContractViolation("BrockettObjective: weights must be strictly increasing");
    }
  }
}

BrockettObjective BrockettObjective::sphere(SymmetricOperator op) {
  return BrockettObjective(std::move(op), Vector::Ones(1));
}

Matrix BrockettObjective::apply(const Matrix& x) const {
  if (const auto* d = std::get_if<DiagonalOperator>(&op_)) {
    return d->values.asDiagonal() * x;
  }
  return std::get<DenseOperator>(op_).a * x;
}

void BrockettObjective::check(const StiefelPoint& x) const {
  if (x.n() != n_ || x.k() != k()) {
    throw ContractViolation("BrockettObjective: point is " + std::to_string(x.n()) + "x" +
                            std::to_string(x.k()) + ", objective expects " + std::to_string(n_) +
                            "x" + std::to_string(k()));
  }
}

double BrockettObjective::value(const StiefelPoint& x) const {
  check(x);
  const Matrix& xm = x.matrix();
  const Matrix ax = apply(xm);
  const Vector quad = (xm.array() * ax.array()).colwise().sum().transpose();
  return 0.5 * weights_.dot(quad);
}

DualTangentVector BrockettObjective::gradient(const StiefelPoint& x) const {
  return evaluate(x).gradient;
}

Objective::Evaluation BrockettObjective::evaluate(const StiefelPoint& x) const {
  check(x);
  const Matrix& xm = x.matrix();
  Matrix g = apply(xm);
  const Vector quad = (xm.array() * g.array()).colwise().sum().transpose();
  g = g * weights_.asDiagonal();  // Euclidean gradient A X diag(alpha)
  return {0.5 * weights_.dot(quad), project_dual(x, g)};
}

// ---------------------------------------------------------------------------

SpectrumInfo::SpectrumInfo(std::vector<double> eigenvalues) : values_(std::move(eigenvalues)) {
  if (values_.empty()) throw ContractViolation("SpectrumInfo: empty spectrum");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw ContractViolation("SpectrumInfo: non-finite eigenvalue");
    if (i > 0 && values_[i] < values_[i - 1]) {
      throw ContractViolation("SpectrumInfo: eigenvalues must be ascending");
    }
  }
}

Vector SpectrumInfo::as_vector() const {
  return Eigen::Map<const Vector>(values_.data(), static_cast<Eigen::Index>(values_.size()));
}

double sphere_condition_number(const SpectrumInfo& spectrum) {
  if (spectrum.size() < 2) throw DegenerateSpectrum("sphere_condition_number: need n >= 2");
  const double gap = spectrum.lambda(2) - spectrum.lambda(1);
  if (!(gap > 0.0)) throw DegenerateSpectrum("sphere_condition_number: lambda_2 == lambda_1");
  return (spectrum.lambda(spectrum.size()) - spectrum.lambda(1)) / gap;
}

double brockett_condition_number(const SpectrumInfo& spectrum, const Vector& weights) {
  const auto k = static_cast<std::size_t>(weights.size());
  const std::size_t n = spectrum.size();
  if (k < 1 || k >= n) throw DegenerateSpectrum("brockett_condition_number: need 1 <= k < n");
  auto alpha = [&](std::size_t i) { return weights(static_cast<Eigen::Index>(i - 1)); };

  double denom = alpha(1) * (spectrum.lambda(k + 1) - spectrum.lambda(k));
  for (std::size_t i = 1; i < k; ++i) {
    const double term =
        (spectrum.lambda(k - i + 1) - spectrum.lambda(k - i)) * (alpha(i + 1) - alpha(i));
    denom = std::min(denom, term);
  }
  if (!(denom > 0.0)) throw DegenerateSpectrum("brockett_condition_number: zero denominator");
  return alpha(k) * (spectrum.lambda(n) - spectrum.lambda(1)) / denom;
}

Vector optimal_weights(const SpectrumInfo& spectrum, Eigen::Index k) {
  const auto kk = static_cast<std::size_t>(k);
  if (k < 1 || kk >= spectrum.size()) throw DegenerateSpectrum("optimal_weights: need 1 <= k < n");
  Vector alpha(k);
  double sum = 0.0;
  for (std::size_t i = 1; i <= kk; ++i) {
    const double gap = spectrum.lambda(kk - i + 2) - spectrum.lambda(kk - i + 1);
    if (!(gap > 0.0)) throw DegenerateSpectrum("optimal_weights: repeated eigenvalue");
    sum += 1.0 / gap;
    alpha(static_cast<Eigen::Index>(i - 1)) = sum;
  }
  return alpha;
}

double optimal_condition_number(const SpectrumInfo& spectrum, Eigen::Index k) {
  const auto kk = static_cast<std::size_t>(k);
  if (k < 1 || kk >= spectrum.size()) {
    throw DegenerateSpectrum("optimal_condition_number: need 1 <= k < n");
  }
  double sum = 0.0;
  for (std::size_t i = 1; i <= kk; ++i) {
    const double gap = spectrum.lambda(i + 1) - spectrum.lambda(i);
    if (!(gap > 0.0)) throw DegenerateSpectrum("optimal_condition_number: repeated eigenvalue");
    sum += 1.0 / gap;
  }
  return (spectrum.lambda(spectrum.size()) - spectrum.lambda(1)) * sum;
}

double known_minimum(const SpectrumInfo& spectrum, const Vector& weights) {
  const auto k = static_cast<std::size_t>(weights.size());
  if (k > spectrum.size()) throw ContractViolation("known_minimum: more weights than eigenvalues");
  double total = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    total += weights(static_cast<Eigen::Index>(i - 1)) * spectrum.lambda(k + 1 - i);
  }
  return 0.5 * total;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t parse_size(std::string_view text, std::string_view specifier) {
  std::size_t n = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, n);
  if (ec != std::errc{} || ptr != end || n < 1) {
    throw ParseError("invalid spectrum size in '" + std::string(specifier) + "'");
  }
  return n;
}

}  // namespace

SpectrumInfo parse_spectrum(std::string_view specifier) {
  const auto colon = specifier.find(':');
  if (colon == std::string_view::npos) {
    throw ParseError("spectrum must look like linear:n, quadratic:n or file:<path>, got '" +
                     std::string(specifier) + "'");
  }
  const auto kind = specifier.substr(0, colon);
  const auto arg = specifier.substr(colon + 1);

  std::vector<double> values;
  if (kind == "linear") {
    const std::size_t n = parse_size(arg, specifier);
    values.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) values.push_back(static_cast<double>(i));
  } else if (kind == "quadratic") {
    const std::size_t n = parse_size(arg, specifier);
    values.reserve(n);
    const double nd = static_cast<double>(n);
    for (std::size_t i = 1; i <= n; ++i) {
      const double id = static_cast<double>(i);
      values.push_back(id * id / nd);
    }
  } else if (kind == "file") {
    std::ifstream in{std::string(arg)};
    if (!in) throw ParseError("cannot open spectrum file '" + std::string(arg) + "'");
    std::string line;
    while (std::getline(in, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      const auto last = line.find_last_not_of(" \t\r");
      const std::string_view token(line.data() + first, last - first + 1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
      if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw ParseError("bad number '" + std::string(token) + "' in spectrum file");
      }
      values.push_back(v);
    }
  } else {
    throw ParseError("unknown spectrum kind '" + std::string(kind) + "'");
  }

  try {
    return SpectrumInfo(std::move(values));
  } catch (const ContractViolation& e) {
    throw ParseError(std::string("invalid spectrum: ") + e.what());
  }
}

}  // namespace stiefel
