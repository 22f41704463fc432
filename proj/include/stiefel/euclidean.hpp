#pragma once

// Reference implementation of the accelerated iteration on R^n
//
//   x_0 = y_0,  x_{t+1} = y_t - gamma_t grad f(y_t),
//   y_{t+1} = x_{t+1} + alpha_t (x_{t+1} - x_t),
//
// used to check the convergence theory numerically before it is carried over
// to the manifold.

#include "stiefel/linalg.hpp"

#include <functional>
#include <variant>
#include <vector>

namespace stiefel::euclid {

using ScalarFn = std::function<double(const Vector&)>;
using GradientFn = std::function<Vector(const Vector&)>;

/// alpha_t = q_t / (2 + q_{t+1}) with q_t = rate * t (rate in (0, 1]).
/// With `backtrack`, gamma_t starts from gamma_{t-1} and is halved until
/// f(x_{t+1}) <= f(y_t) - gamma_t/2 ||grad f(y_t)||^2, so gamma_t <= gamma_{t-1}.
struct QSchedule {
  double gamma = 1.0;
  double rate = 1.0;
  bool backtrack = false;
};

/// alpha_t = (sqrt(L) - sqrt(mu)) / (sqrt(L) + sqrt(mu)), gamma_t = 1/L.
struct StronglyConvex {
  double mu = 1.0;
  double L = 1.0;
};

using Mode = std::variant<QSchedule, StronglyConvex>;

struct Trajectory {
  std::vector<Vector> x;       // x_0 .. x_steps
  std::vector<Vector> y;       // y_0 .. y_steps
  std::vector<double> gamma;   // gamma_t used to produce x_{t+1}; gamma[0] also stands in for gamma_{-1}
  std::vector<double> q;       // q_t (QSchedule mode only)
};

/// Runs `steps` iterations. Throws ContractViolation on invalid mode parameters.
Trajectory accelerated_descent(const ScalarFn& f, const GradientFn& grad, const Vector& x0,
                               const Mode& mode, int steps);

/// J_t = gamma_t q_t (q_t + 2)(f(x_t) - f*) + 1/2 ||2 (y_t - x*) + q_t (y_t - x_t)||^2.
double lyapunov_value(double f_xt, double f_star, const Vector& x_t, const Vector& y_t,
                      double gamma_t, double q_t, const Vector& x_star);

}  // namespace stiefel::euclid
