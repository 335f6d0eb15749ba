#include "dcreg/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "dcreg/errors.hpp"

namespace dcreg {

OracleResult oracle_fit(const Problem& problem, const std::vector<Eigen::Index>& support,
                        const Eigen::VectorXd* beta_star) {
  problem.validate();
  if (support.empty()) throw ParameterError("oracle support must be nonempty");
  std::vector<Eigen::Index> sorted = support;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ParameterError("oracle support contains duplicate indices");
  if (sorted.front() < 0 || sorted.back() >= problem.p())
    throw ParameterError("oracle support index out of range");

  const auto s = static_cast<Eigen::Index>(sorted.size());
  const double inv_n = 1.0 / static_cast<double>(problem.n());
  Eigen::MatrixXd sub(problem.n(), s);
  for (Eigen::Index k = 0; k < s; ++k) sub.col(k) = problem.design.col(sorted[static_cast<size_t>(k)]);

  const Eigen::MatrixXd gram = (sub.transpose() * sub) * inv_n;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const double min_eig = eig.eigenvalues().minCoeff();
  const double max_eig = eig.eigenvalues().maxCoeff();
  if (!(min_eig > 1e-10 * max_eig) || !(min_eig > 0.0))
    throw SingularDesignError("restricted design X_S is rank deficient");

  const Eigen::VectorXd rhs = (sub.transpose() * problem.response) * inv_n;
  const Eigen::VectorXd beta_sub = gram.ldlt().solve(rhs);

  OracleResult out;
  out.beta_oracle = Eigen::VectorXd::Zero(problem.p());
  for (Eigen::Index k = 0; k < s; ++k) out.beta_oracle[sorted[static_cast<size_t>(k)]] = beta_sub[k];
  out.support = std::move(sorted);
  out.gram_min_eigenvalue = min_eig;
  if (beta_star != nullptr) {
    if (beta_star->size() != problem.p())
      throw ShapeError("beta_star length does not match problem dimension");
    out.linf_error_vs_truth = (out.beta_oracle - *beta_star).cwiseAbs().maxCoeff();
  }
  return out;
}

OracleStationarity oracle_is_dstationary(const Problem& problem, const PenaltySpec& spec,
                                         const OracleResult& oracle, const SyntheticTruth& truth) {
  const DcProfile profile = dc_profile(spec);
  if (!profile.zeta)
    throw UnsupportedFamilyError(
        "oracle d-stationarity requires a finite unbiasedness threshold zeta");

  OracleStationarity out;
  out.two_zeta = 2.0 * *profile.zeta;
  double min_abs = std::numeric_limits<double>::infinity();
  for (Eigen::Index j : truth.support) min_abs = std::min(min_abs, std::abs(truth.beta_star[j]));
  out.min_abs_signal = min_abs;
  out.signal_condition_ok = min_abs > out.two_zeta;

  const double tol = default_stationarity_tol(problem, oracle.beta_oracle);
  out.report = check_d_stationary(problem, spec, oracle.beta_oracle, tol);
  out.is_d_stationary = out.report.is_d_stationary;
  return out;
}

}  // namespace dcreg
