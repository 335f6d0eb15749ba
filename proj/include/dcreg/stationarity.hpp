#pragma once

#include <vector>

#include "dcreg/losses.hpp"
#include "dcreg/penalties.hpp"

namespace dcreg {

// First-order-condition residuals certifying d-stationarity of
// F(beta) = L_n(beta) + lambda ||beta||_1 - h_lambda(beta).
struct StationarityReport {
  Eigen::VectorXd residuals;      // per-coordinate FOC violation, >= 0
  double max_violation = 0.0;
  Eigen::VectorXd certificate;    // z in the subdifferential of ||.||_1
  bool is_d_stationary = false;   // max_violation <= tol
  bool strict_dual_feasible = false;  // |z_i| < 1 on every zero coordinate
};

// Residuals: |grad L_i + lambda sign(beta_i) - h'(beta_i)| on nonzero
// coordinates, max(0, |grad L_i - h'(beta_i)| - lambda) on zeros. The
// certificate takes z_i = sign(beta_i) on nonzeros and the clamped
// -(grad L_i - h'(beta_i))/lambda on zeros.
StationarityReport check_d_stationary(const Problem& problem, const PenaltySpec& spec,
                                      const Eigen::VectorXd& beta, double tol);

// Dimension-robust default tolerance 1e-6 * (1 + ||grad L(beta)||_inf).
double default_stationarity_tol(const Problem& problem, const Eigen::VectorXd& beta);

// Exact one-sided derivative of F at beta along direction:
// grad L . d - grad h . d + lambda * (sum over nonzero beta_i of sign(beta_i) d_i
//                                     + sum over zero beta_i of |d_i|).
double directional_derivative(const Problem& problem, const PenaltySpec& spec,
                              const Eigen::VectorXd& beta, const Eigen::VectorXd& direction);

struct Assumption8Audit {
  bool holds = true;                   // every margin >= 0; vacuously true when none checked
  std::vector<Eigen::Index> checked;   // j in S^c with beta_hat_j != 0
  Eigen::VectorXd margins;             // correlation * sign(beta_hat_j) - c*lambda per checked j
  bool used_definitional = false;      // beta_star supplied
};

// Off-support sign alignment margins. With beta_star the definitional form
// (1/n) x_j^T X (beta* - beta_hat) sign(beta_hat_j) >= c*lambda is evaluated;
// without it the checkable surrogate replaces X beta* by y. When no true
// support is supplied the support of beta_hat stands in for it, which leaves
// nothing to check. c must lie in (0,1).
Assumption8Audit audit_assumption8(const Problem& problem, const Eigen::VectorXd& beta_hat,
                                   const std::vector<Eigen::Index>* support_truth, double c,
                                   double lambda, const Eigen::VectorXd* beta_star = nullptr);

}  // namespace dcreg
