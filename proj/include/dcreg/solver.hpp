#pragma once

#include <vector>

#include "dcreg/losses.hpp"
#include "dcreg/penalties.hpp"

namespace dcreg {

enum class InitStrategy { Zero, LassoWarmStart, Custom };

struct SolverConfig {
  double outer_tol = 1e-8;      // delta in the outer stopping rule
  int max_outer_iters = 100;
  double inner_tol = 1e-10;     // KKT residual tolerance of the inner solver
  long max_inner_iters = 100000;
  InitStrategy init = InitStrategy::LassoWarmStart;
  Eigen::VectorXd custom_init;  // used when init == Custom

  void validate(Eigen::Index p) const;
};

struct InnerSolveResult {
  Eigen::VectorXd beta;
  long iters = 0;          // sweeps (coordinate descent) or gradient steps
  bool converged = false;
  double kkt_residual = 0.0;
};

// Minimizes L_n(beta) + sum_i weights_i |beta_i| to KKT residual <= inner_tol:
// cyclic coordinate descent with soft thresholding for squared loss, proximal
// gradient with backtracking line search for logistic loss. Exactly-zero
// design columns are skipped under coordinate descent (coefficient stays at
// the warm start). Never increases the objective relative to the warm start.
InnerSolveResult weighted_l1_solve(const Problem& problem, const Eigen::VectorXd& weights,
                                   const Eigen::VectorXd& warm_start, const SolverConfig& config);

struct FitResult {
  Eigen::VectorXd beta_hat;
  std::vector<double> objective_trace;  // F(beta_k), k = 0, 1, ...; nonincreasing
  int outer_iters = 0;
  long inner_iters_total = 0;
  bool converged = false;
  Eigen::VectorXd weights_final;  // lambda - h'(|beta_hat_i|), entries in [0, lambda]
};

// Full DC objective F(beta) = L_n(beta) + sum_i p_lambda(beta_i).
double dc_objective(const Problem& problem, const PenaltySpec& spec, const Eigen::VectorXd& beta);

// DCA / local linear approximation: beta_{k+1} minimizes the weighted lasso
// with weights lambda - h'(|beta_{k,i}|), warm started at beta_k. Stops when
// max_i min(|delta_i|, |delta_i / beta_{k,i}|) <= outer_tol (the ratio term is
// skipped on zero coordinates) or at max_outer_iters. Throws NumericalFailure
// carrying the trace if the objective turns non-finite.
FitResult dca_fit(const Problem& problem, const PenaltySpec& spec, const SolverConfig& config);

}  // namespace dcreg
