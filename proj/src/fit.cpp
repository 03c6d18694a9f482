#include "vortex/fit.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "vortex/errors.hpp"

namespace vortex {

namespace {

Eigen::VectorXd eval(const ResidualFn& fn, const Eigen::VectorXd& p) {
  std::vector<double> pv(p.data(), p.data() + p.size());
  const auto r = fn(pv);
  return Eigen::Map<const Eigen::VectorXd>(r.data(), Eigen::Index(r.size()));
}

// Central-difference Jacobian, step scaled to each parameter.
Eigen::MatrixXd jacobian(const ResidualFn& fn, const Eigen::VectorXd& p,
                         const std::vector<double>& scales, Eigen::Index n_res) {
  Eigen::MatrixXd jac(n_res, p.size());
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double scale = j < Eigen::Index(scales.size()) ? scales[std::size_t(j)] : 0.0;
    const double h = 1e-6 * std::max({std::abs(p[j]), std::abs(scale), 1e-12});
    Eigen::VectorXd lo = p, hi = p;
    lo[j] -= h;
    hi[j] += h;
    jac.col(j) = (eval(fn, hi) - eval(fn, lo)) / (2.0 * h);
  }
  return jac;
}

std::vector<std::vector<double>> to_nested(const Eigen::MatrixXd& m) {
  std::vector<std::vector<double>> out(std::size_t(m.rows()),
                                       std::vector<double>(std::size_t(m.cols()), 0.0));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[std::size_t(i)][std::size_t(j)] = m(i, j);
  return out;
}

// Covariance = residual variance * (J^T J)^-1 at the returned point.
std::vector<std::vector<double>> covariance_at(const Eigen::MatrixXd& jac,
                                               const Eigen::VectorXd& res) {
  const Eigen::Index n = res.size(), np = jac.cols();
  const double dof = double(n - np);
  const double variance = dof > 0 ? res.squaredNorm() / dof : 0.0;
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  const Eigen::MatrixXd inv = jtj.completeOrthogonalDecomposition().pseudoInverse();
  return to_nested(variance * inv);
}

} // namespace

FitResult levenberg_marquardt(const ResidualFn& residuals, std::vector<double> initial,
                              const LmOptions& options) {
  const auto np = Eigen::Index(initial.size());
  Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(initial.data(), np);

  Eigen::VectorXd res = eval(residuals, p);
  double cost = 0.5 * res.squaredNorm();
  double lambda = 1e-3;

  FitResult out;
  out.iterations = 0;

  Eigen::MatrixXd jac;
  const double clamp = options.step_factor_max;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    out.iterations = iter + 1;
    jac = jacobian(residuals, p, options.scales, res.size());
    const Eigen::VectorXd grad = jac.transpose() * res;
    if (grad.lpNorm<Eigen::Infinity>() <= options.gradient_tol * (1.0 + cost)) break;

    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    bool stepped = false;
    double rel_drop = 0.0;
    for (int attempt = 0; attempt < 40 && !stepped; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      for (Eigen::Index j = 0; j < np; ++j)
        damped(j, j) += lambda * std::max(jtj(j, j), 1e-300);
      const Eigen::VectorXd step = damped.ldlt().solve(-grad);

      // per-iteration clamp: positive parameters change by at most x4,
      // free parameters move at most 4 scale units
      Eigen::VectorXd trial = p + step;
      for (Eigen::Index j = 0; j < np; ++j) {
        const bool positive =
            std::size_t(j) < options.positive.size() && options.positive[std::size_t(j)];
        if (positive) {
          trial[j] = std::clamp(trial[j], p[j] / clamp, p[j] * clamp);
        } else {
          const double scale = std::size_t(j) < options.scales.size()
                                   ? options.scales[std::size_t(j)]
                                   : std::max(std::abs(p[j]), 1.0);
          trial[j] = std::clamp(trial[j], p[j] - clamp * scale, p[j] + clamp * scale);
        }
      }

      const Eigen::VectorXd trial_res = eval(residuals, trial);
      const double trial_cost = 0.5 * trial_res.squaredNorm();
      if (std::isfinite(trial_cost) && trial_cost < cost) {
        rel_drop = (cost - trial_cost) / std::max(cost, 1e-300);
        p = trial;
        res = trial_res;
        cost = trial_cost;
        lambda = std::max(lambda * 0.1, 1e-14);
        stepped = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!stepped || rel_drop < 1e-14) break; // damping saturated or stalled
  }

  jac = jacobian(residuals, p, options.scales, res.size());
  out.gradient_norm = (jac.transpose() * res).lpNorm<Eigen::Infinity>();
  out.converged = out.gradient_norm <= options.gradient_tol * (1.0 + cost);

  out.params.assign(p.data(), p.data() + np);
  out.covariance = covariance_at(jac, res);
  out.residual_rms = res.size() > 0 ? std::sqrt(res.squaredNorm() / double(res.size())) : 0.0;
  return out;
}

FitResult linear_least_squares(const std::vector<std::vector<double>>& rows,
                               const std::vector<double>& y) {
  if (rows.empty() || rows.size() != y.size())
    throw RankDeficientError("linear fit needs matching, non-empty rows and targets");
  const auto n = Eigen::Index(rows.size());
  const auto np = Eigen::Index(rows.front().size());
  Eigen::MatrixXd x(n, np);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < np; ++j) x(i, j) = rows[std::size_t(i)][std::size_t(j)];
  Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);

  const Eigen::MatrixXd jtj = x.transpose() * x;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
  if (!lu.isInvertible())
    throw RankDeficientError("normal matrix is singular: data do not constrain the model");

  const Eigen::VectorXd beta = lu.solve(x.transpose() * yv);
  const Eigen::VectorXd res = x * beta - yv;
  const double dof = double(n - np);
  const double variance = dof > 0 ? res.squaredNorm() / dof : 0.0;

  FitResult out;
  out.params.assign(beta.data(), beta.data() + np);
  out.covariance = to_nested(variance * lu.inverse());
  out.residual_rms = std::sqrt(res.squaredNorm() / double(n));
  out.iterations = 1;
  out.converged = true;
  out.gradient_norm = 0.0;
  return out;
}

} // namespace vortex
