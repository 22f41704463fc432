#include "stiefel/errors.hpp"
#include "stiefel/optimizers.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace stiefel {

void SolverConfig::validate() const {
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) throw ContractViolation("gamma0 must be positive");
  if (!(lambda_d > 1.0) || !std::isfinite(lambda_d)) throw ContractViolation("lambda_d must exceed 1");
  if (!(c_L > 0.5 && c_L < 1.0)) throw ContractViolation("c_L must lie in (1/2, 1)");
  if (!(c_R > 0.0) || !std::isfinite(c_R)) throw ContractViolation("c_R must be positive");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ContractViolation("epsilon must be >= 0");
  if (max_iter < 0) throw ContractViolation("max_iter must be >= 0");
  if (max_linesearch_steps < 1) throw ContractViolation("max_linesearch_steps must be >= 1");
}

LineSearchResult line_search(const Objective& objective, const StiefelPoint& y, double f_y,
                             const DualTangentVector& grad_y, double gamma_in,
                             const SolverConfig& config) {
  if (!(gamma_in > 0.0)) throw ContractViolation("line_search: gamma must be positive");
  if (!grad_y.base().same_as(y)) throw ContractViolation("line_search: gradient is not based at y");
  const double g2 = dual_norm_squared(grad_y);
  if (!(g2 > 0.0)) throw ContractViolation("line_search: zero gradient");

  const CayleyCurve curve(y, grad_y.matrix());
  long evals = 0;
  double gamma = gamma_in;
  std::optional<StiefelPoint> x;
  double f = 0.0;

  // A step the Cayley map cannot take counts as an infinitely bad one.
  auto trial = [&] {
    try {
      x = curve.at(-gamma);
      f = objective.value(*x);
      ++evals;
    } catch (const RetractionFailed&) {
      x.reset();
      f = std::numeric_limits<double>::infinity();
    }
  };

  trial();
  for (int i = 0; i < config.max_linesearch_steps && f < f_y - config.c_L * gamma * g2; ++i) {
    gamma *= config.lambda_d;
    trial();
  }
  for (int i = 0; !(f <= f_y - 0.5 * gamma * g2); ++i) {
    if (i == config.max_linesearch_steps) {
      throw LineSearchFailed("line_search: Armijo condition not met after " +
                             std::to_string(config.max_linesearch_steps) + " reductions");
    }
    gamma /= config.lambda_d;
    trial();
  }
  return LineSearchResult{gamma, *x, f, evals};
}

}  // namespace stiefel
