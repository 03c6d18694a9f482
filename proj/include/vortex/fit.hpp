#pragma once

#include <functional>
#include <vector>

namespace vortex {

struct FitResult {
  std::vector<double> params;
  std::vector<std::vector<double>> covariance; // p x p, residual-variance scaled
  double residual_rms = 0.0;
  double gradient_norm = 0.0; // infinity norm of J^T r at the returned point
  int iterations = 0;
  bool converged = false;
};

struct LmOptions {
  int max_iterations = 200;
  double gradient_tol = 1e-10;  // relative: |g|_inf <= tol * (1 + cost)
  double step_factor_max = 4.0; // per-iteration bound on parameter change
  // Per-parameter flags/scales. positive[i] clamps parameter i
  // multiplicatively into [p/4, 4p]; otherwise |step| <= 4 * scales[i].
  std::vector<bool> positive;
  std::vector<double> scales;
};

using ResidualFn = std::function<std::vector<double>(const std::vector<double>&)>;

// Levenberg-Marquardt with centrally differenced Jacobians. Never throws on
// non-convergence: the best point found so far is returned with
// converged = false.
FitResult levenberg_marquardt(const ResidualFn& residuals, std::vector<double> initial,
                              const LmOptions& options = {});

// Ordinary linear least squares y ~ X beta. Throws RankDeficientError when
// the normal matrix is singular.
FitResult linear_least_squares(const std::vector<std::vector<double>>& rows,
                               const std::vector<double>& y);

} // namespace vortex
