#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcreg/data.hpp"
#include "dcreg/losses.hpp"
#include "dcreg/oracle.hpp"
#include "dcreg/penalties.hpp"
#include "dcreg/solver.hpp"

namespace dcreg {

// Cone of approximately sparse directions ||v_{S^c}||_1 <= ratio ||v_S||_1
// (unit weights c_i = 1).
struct ConeSpec {
  std::vector<Eigen::Index> support;
  double c = 0.5;
  double ratio = 5.0;

  // ratio 5/(2c) for the linear-model cone, (4+c)/c for the GLM cone.
  static ConeSpec linear(std::vector<Eigen::Index> support, double c);
  static ConeSpec glm(std::vector<Eigen::Index> support, double c);
};

bool cone_membership(const Eigen::VectorXd& v, const ConeSpec& cone);

// Monte Carlo restricted-eigenvalue estimate: minimum of (1/n) v^T X^T X v
// over sampled unit-norm cone directions (v_S uniform on the sphere, v_{S^c}
// on a random-sign simplex scaled to u * ratio * ||v_S||_1, u ~ U[0,1]).
// Sampling can only overestimate the true constant. Deterministic given seed;
// uses rng stream 1 so a shared replicate seed stays independent of data
// generation.
double estimate_re_constant(const Problem& problem, const ConeSpec& cone, int samples,
                            std::uint64_t seed);

struct BoundReport {
  double observed = 0.0;
  double bound = 0.0;
  bool satisfied = false;  // observed <= bound
  double slack_ratio = 0.0;
};

BoundReport make_bound_report(double observed, double bound);

// ||beta_hat - beta*||_2 against (5/(2 gamma)) lambda sqrt(||beta*||_0).
BoundReport check_estimation_bound(const FitResult& fit, const SyntheticTruth& truth,
                                   double lambda, double gamma);

// ||X(beta* - beta_hat)||_2^2 / n against both circulating forms of the
// prediction bound: the proof-consistent (5 lambda / 2)^2 |S| / gamma and the
// stated (5 lambda / 2)^2 sqrt(|S|) / gamma.
struct PredictionBound {
  BoundReport proof_form;
  BoundReport stated_form;
};
PredictionBound check_prediction_bound(const Problem& problem, const FitResult& fit,
                                       const SyntheticTruth& truth, double lambda, double gamma);

// Sub-Gaussian rate lambda = 2 sigma sqrt(tau log(p) / n); requires tau >= 2.
double select_lambda(double sigma, double tau, Eigen::Index n, Eigen::Index p);

// GLM estimation bound (4+c) lambda / (2 (gamma - eta_minus)) * sqrt(|S|);
// throws RegimeError when gamma <= eta_minus.
BoundReport check_glm_bound(const FitResult& fit, const SyntheticTruth& truth, double lambda,
                            double gamma, double eta_minus, double c);

// Radius r = min(c lambda sqrt(|S|), r0) of the ball around beta* where
// d-stationary solutions are guaranteed to exist; r0 is the smallest t with
// h_lambda'(t) >= (1-c) lambda, +infinity when the level is never reached.
double existence_ball(const SyntheticTruth& truth, double lambda, double c,
                      const PenaltySpec& spec);

// One Monte Carlo replicate of the verification suite.
struct ReplicateRecord {
  int replicate = 0;
  std::uint64_t seed = 0;
  bool ok = false;            // replicate completed without numerical failure
  std::string failure;        // failure message when !ok
  bool converged = false;
  int outer_iters = 0;
  double l2_error = 0.0;           // ||beta_hat - beta*||_2
  double max_violation = 0.0;      // d-stationarity residual of beta_hat
  bool support_match = false;      // supp(beta_hat) == supp(beta*)
  double linf_vs_oracle = 0.0;     // ||beta_hat - beta^O||_inf (squared loss only)
  bool oracle_equal = false;       // linf_vs_oracle <= 1e-6
  double re_gamma = 0.0;           // Monte Carlo RE estimate (when requested)
  BoundReport estimation;          // Theorem-4.1-style bound (squared loss)
  BoundReport prediction_proof;
  BoundReport prediction_stated;
  bool a8_pass = false;
  bool cone_member = false;        // beta_hat - beta^O in the linear cone
  // GLM-only fields:
  double grad_at_truth_inf = 0.0;  // ||grad L(beta*)||_inf
  bool a10_pass = false;           // grad_at_truth_inf <= lambda / 8
  double hgrad_off_support_inf = 0.0;
  bool a11_pass = false;           // <= (1-c) lambda
  bool glm_regime_ok = false;      // re_gamma > eta_minus
  BoundReport glm;
};

struct ExperimentPlan {
  SyntheticSpec generator;
  PenaltySpec penalty;
  SolverConfig solver;
  int replicates = 1;
  std::uint64_t seed = 0;   // replicate r runs with seed ^ r
  double c = 0.5;           // Assumption-8 / cone constant
  int re_samples = 0;       // 0 skips the RE estimate and all bound checks
  int threads = 1;
};

struct ExperimentResult {
  std::vector<ReplicateRecord> rows;  // in replicate order
  int failures = 0;
  double recovery_rate = 0.0;         // support_match frequency over ok rows
  double oracle_equality_rate = 0.0;  // oracle_equal frequency over ok rows
  double estimation_bound_rate = 0.0;
  double glm_bound_rate = 0.0;        // over rows passing A10 & A11
};

// Runs the replicate suite; per-replicate numerical failures are recorded in
// their rows and the run continues. Replicates may execute on plan.threads
// threads; rows and aggregates are identical regardless of thread count.
ExperimentResult run_experiment(const ExperimentPlan& plan);

// Theorem-4.9 support recovery suite: a serial run_experiment without bound
// checks, reporting recovery and oracle-equality rates.
ExperimentResult support_recovery_experiment(const SyntheticSpec& generator,
                                             const PenaltySpec& penalty,
                                             const SolverConfig& solver, int replicates,
                                             std::uint64_t seed);

// One row per replicate: seed, errors, bound values, flags.
void write_experiment_csv(const std::string& path, const ExperimentResult& result);

}  // namespace dcreg
