#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plenocal/types.hpp"

namespace plenocal {

/// Dense nonlinear least-squares problem, cost = |r(x)|^2.
class LeastSquaresProblem {
 public:
  virtual ~LeastSquaresProblem() = default;
  virtual int parameter_count() const = 0;
  virtual int residual_count() const = 0;
  /// Fills r with residuals at x; when jac is non-null also fills the
  /// residual_count x parameter_count Jacobian dr/dx.
  virtual void evaluate(const VecX& x, VecX& r, MatX* jac) const = 0;
};

struct LevMarOptions {
  int max_iterations = 500;
  double damping_init = 1e-3;  ///< scaled by the mean diagonal of the normal matrix
  double damping_up = 10.0;
  double damping_down = 10.0;
  double cost_rel_tol = 1e-10;  ///< relative cost decrease on an accepted step
  double grad_inf_tol = 1e-12;  ///< infinity norm of the equilibrated gradient
  double step_rel_tol = 1e-14;  ///< relative step size on a rejected step
  std::vector<std::uint8_t> frozen_mask;  ///< per-parameter, 1 = held fixed
  bool compute_spectrum = false;  ///< report eigenvalue range of the equilibrated normal matrix
};

struct LevMarReport {
  int iterations = 0;      ///< accepted steps
  int trial_steps = 0;     ///< total solved trial steps, including rejections
  double initial_cost = 0;
  double final_cost = 0;
  double gradient_inf_norm = 0;
  bool converged = false;
  std::string reason;
  std::vector<double> cost_history;  ///< cost after each accepted step
  double min_eigenvalue = 0;  ///< of the equilibrated normal matrix (if requested)
  double max_eigenvalue = 0;
};

/// Levenberg-Marquardt with multiplicative damping on the diagonally
/// equilibrated normal equations. Only cost-decreasing steps are accepted, so
/// the cost history is strictly decreasing.
LevMarReport levmar_solve(const LeastSquaresProblem& problem, VecX& x,
                          const LevMarOptions& options = {});

/// Central-difference Jacobian, step 1e-6 of each parameter's scale.
/// Used as the reference when validating analytic Jacobians.
MatX numeric_jacobian(const LeastSquaresProblem& problem, const VecX& x,
                      double rel_step = 1e-6);

}  // namespace plenocal
