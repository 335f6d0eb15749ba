#pragma once

#include <Eigen/Core>

namespace dcreg {

enum class LossKind { SquaredError, Logistic };

// One estimation instance: design X (n x p), response y (n), loss kind.
// Immutable after construction; shareable across threads.
struct Problem {
  Eigen::MatrixXd design;
  Eigen::VectorXd response;
  LossKind loss = LossKind::SquaredError;

  Eigen::Index n() const { return design.rows(); }
  Eigen::Index p() const { return design.cols(); }

  // Throws ShapeError / DomainError (logistic responses must be 0/1).
  void validate() const;
};

struct LossEval {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

// Squared loss (1/2n)||y - X*beta||^2 with gradient -(1/n) X^T (y - X*beta);
// logistic negative log likelihood (1/n) sum psi(x_i^T beta) - y_i x_i^T beta
// with psi(u) = log(1 + e^u) evaluated overflow-safe.
LossEval loss_eval(const Problem& problem, const Eigen::VectorXd& beta);

double loss_value(const Problem& problem, const Eigen::VectorXd& beta);
Eigen::VectorXd loss_gradient(const Problem& problem, const Eigen::VectorXd& beta);

// Logistic cumulant psi(u) = log(1 + e^u) and mean function psi'(u) = sigmoid.
double logistic_cumulant(double u);
double logistic_mean(double u);

}  // namespace dcreg
