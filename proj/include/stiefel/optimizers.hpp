#pragma once

// First-order solvers on S_{n,k}: Riemannian gradient descent and accelerated
// gradient descent with function or gradient restart. All of them share the
// two-sided Armijo line search along the Cayley curve.

#include "stiefel/geometry.hpp"
#include "stiefel/objectives.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace stiefel {

struct SolverConfig {
  double gamma0 = 0.1;    // initial step size
  double lambda_d = 1.7;  // line-search growth/shrink factor, > 1
  double c_L = 0.7;       // grow while the decrease beats c_L * gamma * ||g||^2, in (1/2, 1)
  double c_R = 0.01;      // function restart threshold, > 0
  double epsilon = 1e-10; // relative gradient tolerance
  long max_iter = 1'000'000;
  int max_linesearch_steps = 60;
  bool record_history = true;

  /// Throws ContractViolation on out-of-range parameters.
  void validate() const;
};

/// q_t = rate * t. The momentum weight after k accepted steps is
/// alpha_k = q_k / (2 + q_{k+1}), and the extrapolation factor applied to the
/// last displacement is 1 + alpha_k.
struct MomentumSchedule {
  double rate = 1.0;

  double q(long t) const { return rate * static_cast<double>(t); }
  double alpha(long k) const { return q(k) / (2.0 + q(k + 1)); }
  double extrapolation(long k) const { return 1.0 + alpha(k); }
};

enum class Termination { Converged, MaxIterations, LineSearchFailed };

std::string_view to_string(Termination t);

enum class Method { GradientDescent, AgdFunctionRestart, AgdGradientRestart };

std::string_view to_string(Method m);
/// "gd", "agd-function" or "agd-gradient"; throws ParseError otherwise.
Method parse_method(std::string_view name);

struct IterationRecord {
  long t = 0;
  double f = 0.0;               // f(X_t)
  double grad_norm = 0.0;       // ||grad f(X_t)||_{g*}
  double gamma = 0.0;           // step size accepted by the line search that produced X_t
  double base_grad_norm = 0.0;  // ||grad f(Y_{t-1})||_{g*} at the line-search base
  bool restarted = false;
  long momentum = 0;            // momentum counter after the update
};

struct RunTrace {
  StiefelPoint x;  // final iterate
  double f = 0.0;
  double grad_norm = 0.0;
  double initial_grad_norm = 0.0;
  long iterations = 0;
  long restarts = 0;
  long f_evals = 0;
  long g_evals = 0;
  double wall_ms = 0.0;
  double max_defect = 0.0;  // max ||X^T X - I||_F over all X_t and Y_t
  Termination termination = Termination::MaxIterations;
  std::vector<IterationRecord> history;  // history[0] describes X_0

  double relative_grad_norm() const {
    return initial_grad_norm > 0.0 ? grad_norm / initial_grad_norm : 0.0;
  }
};

struct LineSearchResult {
  double gamma = 0.0;
  StiefelPoint x_next;
  double f_next = 0.0;
  long f_evals = 0;
};

/// Two-sided search along X(gamma) = R_1(Y, phi_g(-gamma grad)). First grows
/// gamma by lambda_d while f(X) < f(Y) - c_L gamma ||grad||^2, then shrinks it
/// while f(X) > f(Y) - gamma ||grad||^2 / 2. Each loop runs at most
/// config.max_linesearch_steps times. Throws LineSearchFailed if the Armijo
/// condition still fails after that.
LineSearchResult line_search(const Objective& objective, const StiefelPoint& y, double f_y,
                             const DualTangentVector& grad_y, double gamma_in,
                             const SolverConfig& config);

RunTrace gradient_descent(const Objective& objective, const StiefelPoint& x0,
                          const SolverConfig& config);

RunTrace agd_function_restart(const Objective& objective, const StiefelPoint& x0,
                              const SolverConfig& config, const MomentumSchedule& schedule = {});

RunTrace agd_gradient_restart(const Objective& objective, const StiefelPoint& x0,
                              const SolverConfig& config, const MomentumSchedule& schedule = {});

RunTrace run_method(Method method, const Objective& objective, const StiefelPoint& x0,
                    const SolverConfig& config, const MomentumSchedule& schedule = {});

}  // namespace stiefel
