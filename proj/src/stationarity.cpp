#include "dcreg/stationarity.hpp"

#include <algorithm>
#include <cmath>

#include "dcreg/errors.hpp"

namespace dcreg {

StationarityReport check_d_stationary(const Problem& problem, const PenaltySpec& spec,
                                      const Eigen::VectorXd& beta, double tol) {
  spec.validate();
  if (!(tol > 0.0)) throw ParameterError("stationarity tolerance must be positive");
  if (beta.size() != problem.p()) throw ShapeError("beta length does not match problem dimension");
  const Eigen::VectorXd grad = loss_gradient(problem, beta);
  const double lambda = spec.lambda;

  StationarityReport report;
  report.residuals.resize(beta.size());
  report.certificate.resize(beta.size());
  double worst_zero_dual = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    const double hd = h_derivative(spec, beta[j]);
    if (beta[j] != 0.0) {
      const double sgn = beta[j] > 0 ? 1.0 : -1.0;
      report.residuals[j] = std::abs(grad[j] + lambda * sgn - hd);
      report.certificate[j] = sgn;
    } else {
      const double inner = grad[j] - hd;
      report.residuals[j] = std::max(0.0, std::abs(inner) - lambda);
      const double z = lambda > 0.0 ? std::clamp(-inner / lambda, -1.0, 1.0) : 0.0;
      report.certificate[j] = z;
      worst_zero_dual = std::max(worst_zero_dual, std::abs(z));
    }
  }
  report.max_violation = report.residuals.size() > 0 ? report.residuals.maxCoeff() : 0.0;
  report.is_d_stationary = report.max_violation <= tol;
  report.strict_dual_feasible = worst_zero_dual < 1.0;
  return report;
}

double default_stationarity_tol(const Problem& problem, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd grad = loss_gradient(problem, beta);
  return 1e-6 * (1.0 + grad.cwiseAbs().maxCoeff());
}

double directional_derivative(const Problem& problem, const PenaltySpec& spec,
                              const Eigen::VectorXd& beta, const Eigen::VectorXd& direction) {
  spec.validate();
  if (direction.size() != beta.size() || beta.size() != problem.p())
    throw ShapeError("direction/beta length does not match problem dimension");
  if (direction.isZero(0.0)) throw ParameterError("direction must be nonzero");
  const Eigen::VectorXd grad = loss_gradient(problem, beta);
  double value = grad.dot(direction);
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    value -= h_derivative(spec, beta[j]) * direction[j];
    if (beta[j] != 0.0)
      value += spec.lambda * (beta[j] > 0 ? direction[j] : -direction[j]);
    else
      value += spec.lambda * std::abs(direction[j]);
  }
  return value;
}

Assumption8Audit audit_assumption8(const Problem& problem, const Eigen::VectorXd& beta_hat,
                                   const std::vector<Eigen::Index>* support_truth, double c,
                                   double lambda, const Eigen::VectorXd* beta_star) {
  problem.validate();
  if (beta_hat.size() != problem.p())
    throw ShapeError("beta length does not match problem dimension");
  if (!(c > 0.0 && c < 1.0)) throw ParameterError("c must lie in (0,1)");
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be >= 0");

  Assumption8Audit audit;
  if (support_truth == nullptr) return audit;  // S := supp(beta_hat), nothing off-support

  std::vector<bool> in_support(static_cast<size_t>(problem.p()), false);
  for (Eigen::Index j : *support_truth) {
    if (j < 0 || j >= problem.p()) throw ParameterError("support index out of range");
    in_support[static_cast<size_t>(j)] = true;
  }

  Eigen::VectorXd target;
  if (beta_star != nullptr) {
    if (beta_star->size() != problem.p())
      throw ShapeError("beta_star length does not match problem dimension");
    target = problem.design * (*beta_star - beta_hat);
    audit.used_definitional = true;
  } else {
    target = problem.response - problem.design * beta_hat;
  }

  const double inv_n = 1.0 / static_cast<double>(problem.n());
  std::vector<double> margins;
  for (Eigen::Index j = 0; j < problem.p(); ++j) {
    if (in_support[static_cast<size_t>(j)] || beta_hat[j] == 0.0) continue;
    const double sgn = beta_hat[j] > 0 ? 1.0 : -1.0;
    const double margin = inv_n * problem.design.col(j).dot(target) * sgn - c * lambda;
    audit.checked.push_back(j);
    margins.push_back(margin);
    if (margin < 0.0) audit.holds = false;
  }
  audit.margins =
      Eigen::Map<Eigen::VectorXd>(margins.data(), static_cast<Eigen::Index>(margins.size()));
  return audit;
}

}  // namespace dcreg
