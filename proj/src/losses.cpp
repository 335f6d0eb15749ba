#include "dcreg/losses.hpp"

#include <cmath>

#include "dcreg/errors.hpp"

namespace dcreg {

void Problem::validate() const {
  if (design.rows() < 1 || design.cols() < 1)
    throw ShapeError("design matrix must be at least 1x1");
  if (response.size() != design.rows())
    throw ShapeError("response length does not match design row count");
  if (loss == LossKind::Logistic) {
    for (Eigen::Index i = 0; i < response.size(); ++i)
      if (response[i] != 0.0 && response[i] != 1.0)
        throw DomainError("logistic responses must be 0 or 1");
  }
}

double logistic_cumulant(double u) {
  // log(1+e^u) = max(u,0) + log1p(e^{-|u|})
  return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u)));
}

double logistic_mean(double u) { return 1.0 / (1.0 + std::exp(-u)); }

LossEval loss_eval(const Problem& problem, const Eigen::VectorXd& beta) {
  problem.validate();
  if (beta.size() != problem.p())
    throw ShapeError("beta length does not match design column count");
  const double n = static_cast<double>(problem.n());
  LossEval out;
  if (problem.loss == LossKind::SquaredError) {
    Eigen::VectorXd residual = problem.response - problem.design * beta;
    out.value = residual.squaredNorm() / (2.0 * n);
    out.gradient = -(problem.design.transpose() * residual) / n;
  } else {
    Eigen::VectorXd eta = problem.design * beta;
    double value = 0.0;
    Eigen::VectorXd mean(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      value += logistic_cumulant(eta[i]) - problem.response[i] * eta[i];
      mean[i] = logistic_mean(eta[i]);
    }
    out.value = value / n;
    out.gradient = problem.design.transpose() * (mean - problem.response) / n;
  }
  return out;
}

double loss_value(const Problem& problem, const Eigen::VectorXd& beta) {
  return loss_eval(problem, beta).value;
}

Eigen::VectorXd loss_gradient(const Problem& problem, const Eigen::VectorXd& beta) {
  return loss_eval(problem, beta).gradient;
}

}  // namespace dcreg
