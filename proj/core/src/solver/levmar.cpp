#include "plenocal/solver/levmar.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "plenocal/error.hpp"

namespace plenocal {

namespace {

std::vector<int> active_indices(int n, const std::vector<std::uint8_t>& frozen) {
  std::vector<int> idx;
  idx.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (frozen.empty() || i >= static_cast<int>(frozen.size()) || !frozen[i]) idx.push_back(i);
  }
  return idx;
}

}  // namespace

LevMarReport levmar_solve(const LeastSquaresProblem& problem, VecX& x,
                          const LevMarOptions& options) {
  const int n = problem.parameter_count();
  require(x.size() == n, ErrorCode::Validation, "levmar: parameter vector size mismatch");
  const std::vector<int> active = active_indices(n, options.frozen_mask);

  LevMarReport report;
  VecX r(problem.residual_count());
  MatX jac(problem.residual_count(), n);
  problem.evaluate(x, r, &jac);
  double cost = r.squaredNorm();
  report.initial_cost = cost;
  report.final_cost = cost;

  if (active.empty() || options.max_iterations <= 0) {
    report.converged = active.empty();
    report.reason = active.empty() ? "all parameters frozen" : "iteration budget is zero";
    return report;
  }

  const int m = static_cast<int>(active.size());
  MatX ja(jac.rows(), m);
  auto gather = [&]() {
    for (int j = 0; j < m; ++j) ja.col(j) = jac.col(active[j]);
  };
  gather();

  MatX hessian;
  VecX gradient, scale;
  auto build_normal = [&]() {
    hessian.noalias() = ja.transpose() * ja;
    gradient.noalias() = ja.transpose() * r;
    scale.resize(m);
    for (int j = 0; j < m; ++j) {
      const double d = hessian(j, j);
      scale[j] = d > 1e-300 ? std::sqrt(d) : 1.0;
    }
    // Diagonal equilibration keeps one damping constant meaningful across
    // parameters with mixed physical units.
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) hessian(i, j) /= scale[i] * scale[j];
    for (int j = 0; j < m; ++j) gradient[j] /= scale[j];
  };
  build_normal();

  double lambda = options.damping_init * hessian.trace() / m;
  if (!(lambda > 0)) lambda = options.damping_init;

  report.gradient_inf_norm = gradient.cwiseAbs().maxCoeff();
  if (report.gradient_inf_norm < options.grad_inf_tol) {
    report.converged = true;
    report.reason = "gradient tolerance reached at the initial point";
  }

  VecX r_trial(problem.residual_count());
  while (!report.converged && report.iterations < options.max_iterations) {
    MatX damped = hessian;
    damped.diagonal().array() += lambda;
    const VecX delta_scaled = damped.ldlt().solve(-gradient);
    ++report.trial_steps;

    VecX x_trial = x;
    for (int j = 0; j < m; ++j) x_trial[active[j]] += delta_scaled[j] / scale[j];
    problem.evaluate(x_trial, r_trial, nullptr);
    const double cost_trial = r_trial.squaredNorm();

    if (std::isfinite(cost_trial) && cost_trial < cost) {
      const double decrease = (cost - cost_trial) / std::max(cost, 1e-300);
      x = x_trial;
      cost = cost_trial;
      lambda /= options.damping_down;
      ++report.iterations;
      report.cost_history.push_back(cost);

      problem.evaluate(x, r, &jac);
      gather();
      build_normal();
      report.gradient_inf_norm = gradient.cwiseAbs().maxCoeff();

      if (decrease < options.cost_rel_tol) {
        report.converged = true;
        report.reason = "relative cost decrease below tolerance";
      } else if (report.gradient_inf_norm < options.grad_inf_tol) {
        report.converged = true;
        report.reason = "gradient infinity norm below tolerance";
      }
    } else {
      // A rejected step that is already vanishingly small means the current
      // point is a numerical minimum; shrinking it further cannot help.
      double step_rel = 0;
      for (int j = 0; j < m; ++j) {
        const double dx = std::abs(delta_scaled[j] / scale[j]);
        step_rel = std::max(step_rel, dx / std::max(1.0, std::abs(x[active[j]])));
      }
      if (std::isfinite(cost_trial) && step_rel < options.step_rel_tol) {
        report.converged = true;
        report.reason = "rejected step below step tolerance";
        break;
      }
      lambda *= options.damping_up;
      if (lambda > 1e32) {
        report.reason = "damping overflow, no acceptable step";
        break;
      }
    }
  }

  if (!report.converged && report.reason.empty()) report.reason = "maximum iterations reached";
  report.final_cost = cost;

  if (options.compute_spectrum) {
    Eigen::SelfAdjointEigenSolver<MatX> eig(hessian);
    if (eig.info() == Eigen::Success && eig.eigenvalues().size() > 0) {
      report.min_eigenvalue = eig.eigenvalues().minCoeff();
      report.max_eigenvalue = eig.eigenvalues().maxCoeff();
    }
  }
  return report;
}

MatX numeric_jacobian(const LeastSquaresProblem& problem, const VecX& x, double rel_step) {
  const int n = problem.parameter_count();
  MatX jac(problem.residual_count(), n);
  VecX plus(problem.residual_count()), minus(problem.residual_count());
  for (int j = 0; j < n; ++j) {
    const double h = rel_step * std::max(1.0, std::abs(x[j]));
    VecX xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    problem.evaluate(xp, plus, nullptr);
    problem.evaluate(xm, minus, nullptr);
    jac.col(j) = (plus - minus) / (2 * h);
  }
  return jac;
}

}  // namespace plenocal
