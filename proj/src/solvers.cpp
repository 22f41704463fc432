#include "stiefel/errors.hpp"
#include "stiefel/optimizers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>

namespace stiefel {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxIterations: return "max-iterations";
    case Termination::LineSearchFailed: return "line-search-failed";
  }
  return "unknown";
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::GradientDescent: return "gd";
    case Method::AgdFunctionRestart: return "agd-function";
    case Method::AgdGradientRestart: return "agd-gradient";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "gd") return Method::GradientDescent;
  if (name == "agd-function") return Method::AgdFunctionRestart;
  if (name == "agd-gradient") return Method::AgdGradientRestart;
  throw ParseError("unknown method '" + std::string(name) + "'");
}

namespace {

// Solver state for all three methods. The loop follows the accelerated
// listings; plain gradient descent is the case where the line-search base Y is
// always the current iterate X.
//
// Gradient bookkeeping: grad f(X_t) is needed for the stopping test and
// grad f(Y_t) for the next line search. After a restart Y = X and the cached
// gradient is reused; an extrapolated Y is only evaluated if another
// iteration follows.
class Runner {
 public:
  Runner(Method method, const Objective& objective, const StiefelPoint& x0,
         const SolverConfig& config, const MomentumSchedule& schedule)
      : method_(method),
        objective_(objective),
        config_(config),
        schedule_(schedule),
        trace_{.x = x0, .history = {}},
        grad_x_(DualTangentVector::zero(x0)),
        y_(x0) {
    config_.validate();
    if (x0.n() != objective.n() || x0.k() != objective.k()) {
      throw ContractViolation("solver: starting point does not match the objective's shape");
    }
    if (!(schedule.rate > 0.0 && schedule.rate <= 1.0)) {
      throw ContractViolation("solver: momentum rate must lie in (0, 1]");
    }
  }

  RunTrace run() {
    const auto start = std::chrono::steady_clock::now();

    auto eval = objective_.evaluate(trace_.x);
    ++trace_.f_evals;
    ++trace_.g_evals;
    f_x_ = eval.value;
    grad_x_ = std::move(eval.gradient);
    trace_.initial_grad_norm = std::sqrt(dual_norm_squared(grad_x_));
    grad_norm_x_ = trace_.initial_grad_norm;
    y_ = trace_.x;
    f_y_ = f_x_;
    grad_y_ = grad_x_;
    trace_.max_defect = trace_.x.defect();
    gamma_ = config_.gamma0;
    record(0.0, 0.0, false);

    const double threshold = config_.epsilon * trace_.initial_grad_norm;
    trace_.termination = Termination::MaxIterations;
    while (true) {
      if (grad_norm_x_ <= threshold) {
        trace_.termination = Termination::Converged;
        break;
      }
      if (trace_.iterations >= config_.max_iter) break;
      if (!step()) {
        trace_.termination = Termination::LineSearchFailed;
        break;
      }
    }

    trace_.f = f_x_;
    trace_.grad_norm = grad_norm_x_;
    trace_.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return std::move(trace_);
  }

 private:
  // One iteration; false if the line search failed (state left at the best iterate).
  bool step() {
    if (!grad_y_) {
      auto eval = objective_.evaluate(y_);
      ++trace_.f_evals;
      ++trace_.g_evals;
      f_y_ = eval.value;
      grad_y_ = std::move(eval.gradient);
    }
    const double gy2 = dual_norm_squared(*grad_y_);

    std::optional<LineSearchResult> ls;
    try {
      ls = line_search(objective_, y_, f_y_, *grad_y_, gamma_, config_);
    } catch (const LineSearchFailed&) {
      return false;
    }
    trace_.f_evals += ls->f_evals;
    gamma_ = ls->gamma;
    ++trace_.iterations;

    bool restart = false;
    if (method_ == Method::AgdFunctionRestart) {
      restart = ls->f_next > f_x_ - config_.c_R * gamma_ * gy2;
    } else if (method_ == Method::AgdGradientRestart) {
      const DualTangentVector w = retract_inverse(y_, trace_.x);
      restart = dual_metric(*grad_y_, w) < -gamma_ * gy2;
    }

    if (restart) {
      ++trace_.restarts;
      momentum_ = 0;
      y_ = trace_.x;
      f_y_ = f_x_;
      grad_y_ = grad_x_;
      record(gamma_, std::sqrt(gy2), true);
      return true;
    }

    const StiefelPoint x_prev = trace_.x;
    trace_.x = ls->x_next;
    f_x_ = ls->f_next;
    grad_x_ = objective_.gradient(trace_.x);
    ++trace_.g_evals;
    grad_norm_x_ = std::sqrt(dual_norm_squared(grad_x_));
    trace_.max_defect = std::max(trace_.max_defect, trace_.x.defect());

    if (method_ == Method::GradientDescent) {
      y_ = trace_.x;
      f_y_ = f_x_;
      grad_y_ = grad_x_;
    } else {
      const DualTangentVector v = retract_inverse(x_prev, trace_.x);
      y_ = cayley_retract(x_prev, v, schedule_.extrapolation(momentum_));
      ++momentum_;
      grad_y_.reset();
      trace_.max_defect = std::max(trace_.max_defect, y_.defect());
    }
    record(gamma_, std::sqrt(gy2), false);
    return true;
  }

  void record(double gamma, double base_grad_norm, bool restarted) {
    if (!config_.record_history) return;
    trace_.history.push_back(IterationRecord{trace_.iterations, f_x_, grad_norm_x_, gamma,
                                             base_grad_norm, restarted, momentum_});
  }

  Method method_;
  const Objective& objective_;
  SolverConfig config_;
  MomentumSchedule schedule_;

  RunTrace trace_;
  double f_x_ = 0.0;
  DualTangentVector grad_x_;
  double grad_norm_x_ = 0.0;

  StiefelPoint y_;
  double f_y_ = 0.0;
  std::optional<DualTangentVector> grad_y_;

  double gamma_ = 0.0;
  long momentum_ = 0;
};

}  // namespace

RunTrace run_method(Method method, const Objective& objective, const StiefelPoint& x0,
                    const SolverConfig& config, const MomentumSchedule& schedule) {
  return Runner(method, objective, x0, config, schedule).run();
}

RunTrace gradient_descent(const Objective& objective, const StiefelPoint& x0,
                          const SolverConfig& config) {
  return run_method(Method::GradientDescent, objective, x0, config);
}

RunTrace agd_function_restart(const Objective& objective, const StiefelPoint& x0,
                              const SolverConfig& config, const MomentumSchedule& schedule) {
  return run_method(Method::AgdFunctionRestart, objective, x0, config, schedule);
}

RunTrace agd_gradient_restart(const Objective& objective, const StiefelPoint& x0,
                              const SolverConfig& config, const MomentumSchedule& schedule) {
  return run_method(Method::AgdGradientRestart, objective, x0, config, schedule);
}

}  // namespace stiefel
