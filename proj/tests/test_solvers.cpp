#include "stiefel/errors.hpp"
#include "stiefel/optimizers.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace stiefel {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Forwards to another objective and counts every call.
class CountingObjective final : public Objective {
 public:
  explicit CountingObjective(const Objective& inner) : inner_(inner) {}

  Eigen::Index n() const override { return inner_.n(); }
  Eigen::Index k() const override { return inner_.k(); }
  double value(const StiefelPoint& x) const override {
    ++values;
    return inner_.value(x);
  }
  DualTangentVector gradient(const StiefelPoint& x) const override {
    ++gradients;
    return inner_.gradient(x);
  }
  Evaluation evaluate(const StiefelPoint& x) const override {
    ++evaluations;
    return inner_.evaluate(x);
  }

  mutable long values = 0;
  mutable long gradients = 0;
  mutable long evaluations = 0;

 private:
  const Objective& inner_;
};

// Finite gradient but NaN values along any step.
class BrokenObjective final : public Objective {
 public:
  explicit BrokenObjective(const Objective& inner) : inner_(inner) {}
  Eigen::Index n() const override { return inner_.n(); }
  Eigen::Index k() const override { return inner_.k(); }
  double value(const StiefelPoint&) const override { return std::numeric_limits<double>::quiet_NaN(); }
  DualTangentVector gradient(const StiefelPoint& x) const override { return inner_.gradient(x); }
  Evaluation evaluate(const StiefelPoint& x) const override { return inner_.evaluate(x); }

 private:
  const Objective& inner_;
};

BrockettObjective small_sphere() { return BrockettObjective::sphere(DiagonalOperator{vec({1, 2, 3})}); }

SolverConfig tight() {
  SolverConfig c;
  c.epsilon = 1e-10;
  return c;
}

constexpr Method kMethods[] = {Method::GradientDescent, Method::AgdFunctionRestart,
                               Method::AgdGradientRestart};

TEST(SolverConfig, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.c_L = 0.5;
  EXPECT_THROW(c.validate(), ContractViolation);
  c = {};
  c.lambda_d = 1.0;
  EXPECT_THROW(c.validate(), ContractViolation);
  c = {};
  c.gamma0 = 0.0;
  EXPECT_THROW(c.validate(), ContractViolation);
  c = {};
  c.c_R = -1.0;
  EXPECT_THROW(c.validate(), ContractViolation);
}

TEST(Method, NamesRoundTrip) {
  for (Method m : kMethods) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_THROW(parse_method("newton"), ParseError);
}

TEST(MomentumSchedule, DefaultSatisfiesTheoremCondition) {
  const MomentumSchedule s;
  EXPECT_EQ(s.q(0), 0.0);
  for (long t = 0; t <= 1'000'000; ++t) {
    const auto q0 = static_cast<long long>(s.q(t));
    const auto q1 = static_cast<long long>(s.q(t + 1));
    ASSERT_EQ(static_cast<double>(q0), s.q(t));
    ASSERT_LE((q1 + 1) * (q1 + 1), (q0 + 2) * (q0 + 2) + 1) << "t=" << t;
  }
  EXPECT_DOUBLE_EQ(s.extrapolation(0), 1.0);
  EXPECT_DOUBLE_EQ(s.extrapolation(3), 1.0 + 3.0 / 6.0);
}

// On the circle with A = diag(0, 1), f(theta) = sin(theta)^2 / 2.
struct Circle {
  BrockettObjective f = BrockettObjective::sphere(DiagonalOperator{vec({0, 1})});
  StiefelPoint y{from_rows({{std::cos(0.4)}, {std::sin(0.4)}})};
  Objective::Evaluation e = f.evaluate(y);
  double g2 = dual_norm_squared(e.gradient);
};

TEST(LineSearch, GrowsTinySteps) {
  const Circle c;
  const SolverConfig config;
  const LineSearchResult r = line_search(c.f, c.y, c.e.value, c.e.gradient, 1e-8, config);
  EXPECT_GT(r.gamma, 1e-8 * config.lambda_d);
  EXPECT_LE(r.f_next, c.e.value - 0.5 * r.gamma * c.g2);
}

TEST(LineSearch, NoOpBracket) {
  const Circle c;
  const SolverConfig config;
  // find a gamma with the decrease strictly between the two thresholds
  double chosen = 0.0;
  for (double gamma = 1e-3; gamma < 10.0; gamma *= 1.05) {
    const double f = c.f.value(cayley_retract(c.y, c.e.gradient, -gamma));
    if (f < c.e.value - 0.5 * gamma * c.g2 && f > c.e.value - config.c_L * gamma * c.g2) {
      chosen = gamma;
      break;
    }
  }
  ASSERT_GT(chosen, 0.0);
  const LineSearchResult r = line_search(c.f, c.y, c.e.value, c.e.gradient, chosen, config);
  EXPECT_EQ(r.gamma, chosen);
  EXPECT_EQ(r.f_evals, 1);
  EXPECT_EQ(r.x_next.matrix(), cayley_retract(c.y, c.e.gradient, -chosen).matrix());
}

TEST(LineSearch, ShrinksHugeSteps) {
  const Circle c;
  const SolverConfig config;
  const LineSearchResult r = line_search(c.f, c.y, c.e.value, c.e.gradient, 1e6, config);
  EXPECT_LT(r.gamma, 1e6);
  EXPECT_GT(r.f_evals, 1);
  EXPECT_LE(r.f_next, c.e.value - 0.5 * r.gamma * c.g2);
}

TEST(LineSearch, Preconditions) {
  const Circle c;
  const SolverConfig config;
  EXPECT_THROW(line_search(c.f, c.y, c.e.value, c.e.gradient, 0.0, config), ContractViolation);
  const StiefelPoint critical(from_rows({{1}, {0}}));
  EXPECT_THROW(line_search(c.f, critical, 0.0, DualTangentVector::zero(critical), 1.0, config),
               ContractViolation);
}

TEST(LineSearch, FailsOnNaNObjective) {
  const Circle c;
  const BrokenObjective broken(c.f);
  EXPECT_THROW(line_search(broken, c.y, c.e.value, c.e.gradient, 1.0, SolverConfig{}),
               LineSearchFailed);
}

TEST(Solvers, CriticalStartNeedsNoIterations) {
  const auto f = small_sphere();
  const StiefelPoint x0(from_rows({{1}, {0}, {0}}));
  for (Method m : kMethods) {
    const RunTrace t = run_method(m, f, x0, tight());
    EXPECT_EQ(t.termination, Termination::Converged);
    EXPECT_EQ(t.iterations, 0);
    EXPECT_EQ(t.g_evals, 1);
  }
}

TEST(Solvers, LineSearchFailureStopsWithBestIterate) {
  const auto f = small_sphere();
  const BrokenObjective broken(f);
  const StiefelPoint x0 = random_point(3, 1, 1);
  for (Method m : kMethods) {
    const RunTrace t = run_method(m, broken, x0, tight());
    EXPECT_EQ(t.termination, Termination::LineSearchFailed);
    EXPECT_EQ(t.iterations, 0);
    EXPECT_EQ(t.x.matrix(), x0.matrix());
  }
}

TEST(Solvers, IterationCap) {
  const auto f = small_sphere();
  SolverConfig c = tight();
  c.max_iter = 3;
  for (Method m : kMethods) {
    const RunTrace t = run_method(m, f, random_point(3, 1, 2), c);
    EXPECT_EQ(t.termination, Termination::MaxIterations);
    EXPECT_EQ(t.iterations, 3);
  }
}

TEST(Solvers, ShapeMismatch) {
  EXPECT_THROW(gradient_descent(small_sphere(), random_point(4, 1, 0), tight()), ContractViolation);
}

TEST(GradientDescent, FindsSmallestEigenvector) {
  const auto f = small_sphere();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RunTrace t = gradient_descent(f, random_point(3, 1, seed), tight());
    EXPECT_EQ(t.termination, Termination::Converged);
    EXPECT_GE(std::abs(t.x.matrix()(0, 0)), 1 - 1e-8);
    EXPECT_LE(t.relative_grad_norm(), 1e-10);
  }
}

TEST(GradientDescent, ArmijoDecreaseEveryStep) {
  const BrockettObjective f(DiagonalOperator{parse_spectrum("linear:40").as_vector()}, vec({1, 2, 3}));
  const RunTrace t = gradient_descent(f, random_point(40, 3, 5), tight());
  ASSERT_EQ(t.termination, Termination::Converged);
  ASSERT_EQ(t.history.size(), static_cast<std::size_t>(t.iterations) + 1);
  for (std::size_t i = 1; i < t.history.size(); ++i) {
    const auto& prev = t.history[i - 1];
    const auto& cur = t.history[i];
    EXPECT_DOUBLE_EQ(cur.base_grad_norm, prev.grad_norm);
    EXPECT_LE(cur.f, prev.f - 0.5 * cur.gamma * cur.base_grad_norm * cur.base_grad_norm) << i;
  }
}

TEST(Agd, FirstIterationNeverRestarts) {
  const BrockettObjective f(DiagonalOperator{parse_spectrum("linear:30").as_vector()}, vec({1, 2}));
  for (Method m : {Method::AgdFunctionRestart, Method::AgdGradientRestart}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const RunTrace t = run_method(m, f, random_point(30, 2, seed), tight());
      ASSERT_GE(t.history.size(), 2u);
      EXPECT_FALSE(t.history[1].restarted) << to_string(m) << " seed " << seed;
    }
  }
}

TEST(Agd, ConvergesOnSmallSphere) {
  const auto f = small_sphere();
  for (Method m : {Method::AgdFunctionRestart, Method::AgdGradientRestart}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const RunTrace agd = run_method(m, f, random_point(3, 1, seed), tight());
      EXPECT_EQ(agd.termination, Termination::Converged);
      EXPECT_GE(std::abs(agd.x.matrix()(0, 0)), 1 - 1e-8) << to_string(m) << " seed " << seed;
    }
  }
}

// kappa = 29. Below kappa ~ 10 restarts eat the gain (see known_deviations.cpp).
TEST(Agd, BeatsGradientDescentOnLinearSphere) {
  const auto f = BrockettObjective::sphere(DiagonalOperator{parse_spectrum("linear:30").as_vector()});
  for (Method m : {Method::AgdFunctionRestart, Method::AgdGradientRestart}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const StiefelPoint x0 = random_point(30, 1, seed);
      const RunTrace gd = gradient_descent(f, x0, tight());
      const RunTrace agd = run_method(m, f, x0, tight());
      EXPECT_EQ(agd.termination, Termination::Converged);
      EXPECT_LT(agd.iterations, gd.iterations) << to_string(m) << " seed " << seed;
    }
  }
}

TEST(Agd, AcceptedStepsSatisfyRestartTest) {
  const BrockettObjective f(DiagonalOperator{parse_spectrum("linear:80").as_vector()}, vec({1, 2, 3}));
  const SolverConfig c = tight();
  const RunTrace t = agd_function_restart(f, random_point(80, 3, 9), c);
  ASSERT_EQ(t.termination, Termination::Converged);
  double f_x = t.history[0].f;
  long accepted = 0;
  for (std::size_t i = 1; i < t.history.size(); ++i) {
    const auto& r = t.history[i];
    if (r.restarted) {
      EXPECT_EQ(r.f, f_x);
      EXPECT_EQ(r.momentum, 0);
      continue;
    }
    EXPECT_LE(r.f, f_x - c.c_R * r.gamma * r.base_grad_norm * r.base_grad_norm) << i;
    f_x = r.f;
    ++accepted;
  }
  EXPECT_EQ(accepted + t.restarts, t.iterations);
}

TEST(Agd, RestartedDescentBound) {
  const BrockettObjective f(DiagonalOperator{parse_spectrum("quadratic:120").as_vector()},
                            vec({1, 2, 3, 4}));
  const SolverConfig c = tight();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RunTrace t = agd_function_restart(f, random_point(120, 4, seed), c);
    ASSERT_EQ(t.termination, Termination::Converged);
    double sum = 0.0;
    double lowest = t.history[0].f;
    for (std::size_t i = 1; i < t.history.size(); ++i) {
      const auto& r = t.history[i];
      EXPECT_LE(r.f, t.history[i - 1].f);
      lowest = std::min(lowest, r.f);
      if (!r.restarted) sum += r.gamma * r.base_grad_norm * r.base_grad_norm;
    }
    EXPECT_LE(sum, (t.history[0].f - lowest) / c.c_R);
  }
}

TEST(Agd, GradientRestartReachesBrockettMinimum) {
  const SpectrumInfo s = parse_spectrum("linear:50");
  const Vector alpha = vec({1, 2, 3, 4, 5});
  const BrockettObjective f(DiagonalOperator{s.as_vector()}, alpha);
  for (Method m : kMethods) {
    const RunTrace t = run_method(m, f, random_point(50, 5, 3), tight());
    EXPECT_EQ(t.termination, Termination::Converged);
    EXPECT_NEAR(t.f, known_minimum(s, alpha), 1e-8) << to_string(m);
    EXPECT_LE(t.max_defect, 1e-8);
  }
}

TEST(Agd, DenseOperatorReachesJacobiMinimum) {
  std::mt19937_64 rng(13);
  const Matrix b = testing::gaussian(25, 25, rng);
  const Matrix a = 0.5 * (b + b.transpose());
  const SymmetricEigen eig = jacobi_eigh(a);
  const SpectrumInfo s(std::vector<double>(eig.eigenvalues.data(),
                                           eig.eigenvalues.data() + eig.eigenvalues.size()));
  const Vector alpha = vec({1, 2, 3});
  const BrockettObjective f(DenseOperator{a}, alpha);
  const RunTrace t = agd_gradient_restart(f, random_point(25, 3, 4), tight());
  EXPECT_EQ(t.termination, Termination::Converged);
  EXPECT_NEAR(t.f, known_minimum(s, alpha), 1e-8);
}

TEST(Solvers, IteratesStayOnTheManifold) {
  const BrockettObjective f(DiagonalOperator{parse_spectrum("linear:300").as_vector()},
                            vec({1, 2, 3, 4, 5, 6}));
  for (Method m : kMethods) {
    const RunTrace t = run_method(m, f, random_point(300, 6, 8), tight());
    EXPECT_EQ(t.termination, Termination::Converged);
    EXPECT_LE(t.max_defect, 1e-8) << to_string(m);
    EXPECT_LE(orthonormality_defect(t.x.matrix()), 1e-8);
  }
}

TEST(Solvers, EvaluationCountersAreExact) {
  const BrockettObjective inner(DiagonalOperator{parse_spectrum("linear:60").as_vector()},
                                vec({1, 2, 3}));
  for (Method m : kMethods) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const CountingObjective f(inner);
      const RunTrace t = run_method(m, f, random_point(60, 3, seed), tight());
      ASSERT_EQ(t.termination, Termination::Converged);
      EXPECT_EQ(t.f_evals, f.values + f.evaluations) << to_string(m);
      EXPECT_EQ(t.g_evals, f.gradients + f.evaluations) << to_string(m);

      // Gradients are taken at X_0, at every accepted X_{t+1}, and at every
      // extrapolated Y that is used as a line-search base.
      const long accepted = t.iterations - t.restarts;
      if (m == Method::GradientDescent) {
        EXPECT_EQ(t.restarts, 0);
        EXPECT_EQ(t.g_evals, t.iterations + 1);
      } else {
        const long last_accepted = t.history.back().restarted ? 0 : 1;
        EXPECT_EQ(t.g_evals, 1 + 2 * accepted - last_accepted) << to_string(m);
      }
    }
  }
}

}  // namespace
}  // namespace stiefel
