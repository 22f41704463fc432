#include "stiefel/euclidean.hpp"

#include "stiefel/errors.hpp"

#include <cmath>

namespace stiefel::euclid {

Trajectory accelerated_descent(const ScalarFn& f, const GradientFn& grad, const Vector& x0,
                               const Mode& mode, int steps) {
  if (steps < 0) throw ContractViolation("accelerated_descent: negative step count");

  Trajectory out;
  out.x.push_back(x0);
  out.y.push_back(x0);

  if (const auto* sc = std::get_if<StronglyConvex>(&mode)) {
    if (!(sc->mu > 0.0 && sc->mu <= sc->L)) {
      throw ContractViolation("accelerated_descent: need 0 < mu <= L");
    }
    const double alpha = (std::sqrt(sc->L) - std::sqrt(sc->mu)) / (std::sqrt(sc->L) + std::sqrt(sc->mu));
    const double gamma = 1.0 / sc->L;
    for (int t = 0; t < steps; ++t) {
      const Vector& y = out.y.back();
      Vector x_next = y - gamma * grad(y);
      Vector y_next = x_next + alpha * (x_next - out.x.back());
      out.gamma.push_back(gamma);
      out.x.push_back(std::move(x_next));
      out.y.push_back(std::move(y_next));
    }
    return out;
  }

  const auto& qs = std::get<QSchedule>(mode);
  if (!(qs.gamma > 0.0)) throw ContractViolation("accelerated_descent: gamma must be positive");
  if (!(qs.rate > 0.0 && qs.rate <= 1.0)) {
    throw ContractViolation("accelerated_descent: q rate must lie in (0, 1]");
  }
  auto q = [&](int t) { return qs.rate * t; };

  double gamma = qs.gamma;
  out.q.push_back(q(0));
  for (int t = 0; t < steps; ++t) {
    const Vector& y = out.y.back();
    const Vector g = grad(y);
    Vector x_next = y - gamma * g;
    if (qs.backtrack) {
      const double fy = f(y);
      const double g2 = g.squaredNorm();
      while (f(x_next) > fy - 0.5 * gamma * g2) {
        gamma *= 0.5;
        x_next = y - gamma * g;
      }
    }
    const double alpha = q(t) / (2.0 + q(t + 1));
    Vector y_next = x_next + alpha * (x_next - out.x.back());
    out.gamma.push_back(gamma);
    out.q.push_back(q(t + 1));
    out.x.push_back(std::move(x_next));
    out.y.push_back(std::move(y_next));
  }
  return out;
}

double lyapunov_value(double f_xt, double f_star, const Vector& x_t, const Vector& y_t,
                      double gamma_t, double q_t, const Vector& x_star) {
  const Vector s = 2.0 * (y_t - x_star) + q_t * (y_t - x_t);
  return gamma_t * q_t * (q_t + 2.0) * (f_xt - f_star) + 0.5 * s.squaredNorm();
}

}  // namespace stiefel::euclid
