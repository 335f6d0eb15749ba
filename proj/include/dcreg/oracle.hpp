#pragma once

#include <optional>
#include <vector>

#include "dcreg/data.hpp"
#include "dcreg/losses.hpp"
#include "dcreg/penalties.hpp"
#include "dcreg/stationarity.hpp"

namespace dcreg {

struct OracleResult {
  Eigen::VectorXd beta_oracle;        // exactly zero off support
  std::vector<Eigen::Index> support;  // sorted
  std::optional<double> linf_error_vs_truth;
  double gram_min_eigenvalue = 0.0;   // lambda_min of (1/n) X_S^T X_S
};

// Least squares restricted to the given support,
// beta_S = (X_S^T X_S)^{-1} X_S^T y. Throws SingularDesignError when the
// restricted gram matrix is numerically rank deficient
// (lambda_min <= 1e-10 * lambda_max). Passing beta_star fills
// linf_error_vs_truth.
OracleResult oracle_fit(const Problem& problem, const std::vector<Eigen::Index>& support,
                        const Eigen::VectorXd* beta_star = nullptr);

struct OracleStationarity {
  bool is_d_stationary = false;
  bool signal_condition_ok = false;  // min nonzero |beta*| > 2*zeta
  double min_abs_signal = 0.0;
  double two_zeta = 0.0;
  StationarityReport report;
};

// Checks whether the oracle estimator is d-stationary for the penalized
// objective. Requires a family with a finite unbiasedness threshold zeta
// (throws UnsupportedFamilyError for transformed-l1 / logarithmic / l1).
OracleStationarity oracle_is_dstationary(const Problem& problem, const PenaltySpec& spec,
                                         const OracleResult& oracle, const SyntheticTruth& truth);

}  // namespace dcreg
