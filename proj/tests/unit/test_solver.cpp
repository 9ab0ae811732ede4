#include <cmath>

#include "doctest.h"
#include "plenocal/solver/levmar.hpp"

using namespace plenocal;

namespace {

// r = A x - b with a well conditioned tall A.
class LinearProblem : public LeastSquaresProblem {
 public:
  LinearProblem() {
    a_.resize(6, 2);
    a_ << 1, 0, 0, 1, 1, 1, 2, -1, 1, 3, -1, 2;
    b_.resize(6);
    b_ << 1, 2, 2.5, 0.5, 6, 4;
  }
  int parameter_count() const override { return 2; }
  int residual_count() const override { return 6; }
  void evaluate(const VecX& x, VecX& r, MatX* jac) const override {
    r = a_ * x - b_;
    if (jac) *jac = a_;
  }
  VecX normal_solution() const {
    return (a_.transpose() * a_).ldlt().solve(a_.transpose() * b_);
  }

 private:
  MatX a_;
  VecX b_;
};

// Classic banana valley: r = (1 - x, 10 (y - x^2)), minimum at (1, 1).
class BananaProblem : public LeastSquaresProblem {
 public:
  int parameter_count() const override { return 2; }
  int residual_count() const override { return 2; }
  void evaluate(const VecX& x, VecX& r, MatX* jac) const override {
    r.resize(2);
    r << 1 - x[0], 10 * (x[1] - x[0] * x[0]);
    if (jac) {
      jac->resize(2, 2);
      *jac << -1, 0, -20 * x[0], 10;
    }
  }
};

// Exponential decay fit with analytic jacobian, for numeric comparison.
class DecayProblem : public LeastSquaresProblem {
 public:
  int parameter_count() const override { return 2; }
  int residual_count() const override { return 5; }
  void evaluate(const VecX& x, VecX& r, MatX* jac) const override {
    r.resize(5);
    if (jac) jac->resize(5, 2);
    for (int i = 0; i < 5; ++i) {
      const double t = 0.5 * i;
      const double model = x[0] * std::exp(-x[1] * t);
      r[i] = model - data_[i];
      if (jac) {
        (*jac)(i, 0) = std::exp(-x[1] * t);
        (*jac)(i, 1) = -t * model;
      }
    }
  }

 private:
  double data_[5] = {2.0, 1.21, 0.74, 0.44, 0.27};
};

}  // namespace

TEST_CASE("linear problems converge to the normal solution") {
  LinearProblem problem;
  VecX x = VecX::Zero(2);
  LevMarOptions opt;
  opt.compute_spectrum = true;
  const LevMarReport report = levmar_solve(problem, x, opt);
  CHECK(report.converged);
  CHECK(x.isApprox(problem.normal_solution(), 1e-8));
  CHECK(report.final_cost <= report.initial_cost);
  CHECK(report.iterations <= 10);
  CHECK(report.min_eigenvalue > 0);
  CHECK(report.max_eigenvalue >= report.min_eigenvalue);
  // Equilibration bounds the diagonal of the scaled normal matrix by one.
  CHECK(report.max_eigenvalue <= 2.0 + 1e-9);

  for (std::size_t i = 1; i < report.cost_history.size(); ++i)
    CHECK(report.cost_history[i] < report.cost_history[i - 1]);
}

TEST_CASE("banana valley reaches the global minimum") {
  BananaProblem problem;
  VecX x(2);
  x << -1.2, 1.0;
  const LevMarReport report = levmar_solve(problem, x);
  CHECK(report.converged);
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(report.final_cost < 1e-14);
}

TEST_CASE("frozen parameters are held exactly") {
  BananaProblem problem;
  VecX x(2);
  x << -1.2, 1.0;
  LevMarOptions opt;
  opt.frozen_mask = {1, 0};
  const LevMarReport report = levmar_solve(problem, x, opt);
  CHECK(report.converged);
  CHECK(x[0] == -1.2);
  // With x frozen the optimum puts y on the parabola.
  CHECK(x[1] == doctest::Approx(1.44).epsilon(1e-8));

  opt.frozen_mask = {1, 1};
  VecX y(2);
  y << 0.3, 0.7;
  const LevMarReport frozen = levmar_solve(problem, y, opt);
  CHECK(frozen.iterations == 0);
  CHECK(y[0] == 0.3);
  CHECK(y[1] == 0.7);
}

TEST_CASE("numeric jacobian matches analytic") {
  DecayProblem problem;
  VecX x(2);
  x << 1.7, 0.9;
  VecX r;
  MatX analytic;
  problem.evaluate(x, r, &analytic);
  const MatX numeric = numeric_jacobian(problem, x);
  CHECK((analytic - numeric).cwiseAbs().maxCoeff() < 1e-6);

  const LevMarReport report = levmar_solve(problem, x);
  CHECK(report.converged);
  CHECK(x[0] == doctest::Approx(2.0).epsilon(0.02));
  CHECK(x[1] == doctest::Approx(1.0).epsilon(0.02));
}
