#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dcreg/errors.hpp"
#include "dcreg/solver.hpp"
#include "penalty_suite.hpp"
#include "test_util.hpp"

using namespace dcreg;

namespace {

SolverConfig tight_config() {
  SolverConfig config;
  config.outer_tol = 1e-8;
  config.inner_tol = 1e-10;
  config.max_outer_iters = 100;
  config.max_inner_iters = 100000;
  return config;
}

Problem orthonormal_problem(Rng& rng, const Eigen::VectorXd& correlations) {
  const Eigen::Index n = correlations.size();
  Eigen::MatrixXd X = testutil::orthonormal_design(rng, n);
  // (1/n) X^T y = z  <=>  y = X z when (1/n) X^T X = I
  Eigen::VectorXd y = X * correlations;
  return Problem{std::move(X), std::move(y), LossKind::SquaredError};
}

}  // namespace

TEST_CASE("weighted lasso on an orthonormal design soft-thresholds") {
  Rng rng(41);
  Eigen::VectorXd z(3);
  z << 3.0, 0.5, -2.0;
  Problem problem = orthonormal_problem(rng, z);
  const auto result = weighted_l1_solve(problem, Eigen::VectorXd::Ones(3),
                                        Eigen::VectorXd::Zero(3), tight_config());
  CHECK(result.converged);
  CHECK(result.beta[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(result.beta[1] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(result.beta[2] == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("zero weights recover ordinary least squares") {
  Rng rng(42);
  Problem problem = testutil::random_problem(rng, 30, 5);
  const auto result = weighted_l1_solve(problem, Eigen::VectorXd::Zero(5),
                                        Eigen::VectorXd::Zero(5), tight_config());
  const Eigen::MatrixXd gram = problem.design.transpose() * problem.design;
  const Eigen::VectorXd ols = gram.ldlt().solve(problem.design.transpose() * problem.response);
  CHECK((result.beta - ols).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("weights dominating the correlations keep the origin") {
  Rng rng(43);
  Problem problem = testutil::random_problem(rng, 25, 6);
  const Eigen::VectorXd corr =
      (problem.design.transpose() * problem.response / static_cast<double>(problem.n()))
          .cwiseAbs();
  const Eigen::VectorXd weights = (corr.array() + 1e-6).matrix();
  const auto result = weighted_l1_solve(problem, weights, Eigen::VectorXd::Zero(6), tight_config());
  CHECK(result.beta.isZero(0.0));
  CHECK(result.converged);
}

TEST_CASE("zero design columns are skipped and keep the warm start") {
  Rng rng(44);
  Problem problem = testutil::random_problem(rng, 20, 4);
  problem.design.col(2).setZero();
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(4);
  warm[2] = 0.7;
  const auto result =
      weighted_l1_solve(problem, Eigen::VectorXd::Constant(4, 0.3), warm, tight_config());
  CHECK(result.converged);
  CHECK(result.beta[2] == 0.7);
}

TEST_CASE("dca_fit with the L1 penalty reproduces the lasso in one outer iteration") {
  Rng rng(45);
  Eigen::VectorXd z(4);
  z << 2.5, -0.4, 1.1, 0.0;
  Problem problem = orthonormal_problem(rng, z);
  const PenaltySpec spec = PenaltySpec::l1(1.0);
  const FitResult fit = dca_fit(problem, spec, tight_config());
  CHECK(fit.converged);
  CHECK(fit.outer_iters == 1);
  CHECK(fit.beta_hat[0] == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(fit.beta_hat[1] == doctest::Approx(0.0));
  CHECK(fit.beta_hat[2] == doctest::Approx(0.1).epsilon(1e-7));
  CHECK(fit.beta_hat[3] == doctest::Approx(0.0));
}

TEST_CASE("dca_fit matches the scalar grid-search oracle on orthonormal designs") {
  Rng rng(46);
  Eigen::VectorXd z(6);
  z << 3.0, 1.5, -2.4, 0.7, -1.2, 0.05;
  Problem problem = orthonormal_problem(rng, z);
  for (const PenaltySpec& spec :
       {PenaltySpec::mcp(1.0, 2.0), PenaltySpec::scad(1.0, 3.7), PenaltySpec::l1(1.0)}) {
    const FitResult fit = dca_fit(problem, spec, tight_config());
    CHECK(fit.converged);
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      const double expected = testutil::scalar_prox_oracle(spec, z[j]);
      CAPTURE(j);
      CHECK(std::abs(fit.beta_hat[j] - expected) <= 2e-5);
    }
  }
  // firm-threshold pins: z >= gamma*lambda is unbiased, the midrange shrinks
  const FitResult mcp = dca_fit(problem, PenaltySpec::mcp(1.0, 2.0), tight_config());
  CHECK(mcp.beta_hat[0] == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(mcp.beta_hat[1] == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("objective trace is monotone and weights stay in [0, lambda]") {
  Rng rng(47);
  for (auto family : {PenaltyFamily::L1, PenaltyFamily::Scad, PenaltyFamily::Mcp,
                      PenaltyFamily::CappedL1, PenaltyFamily::TransformedL1,
                      PenaltyFamily::Logarithmic}) {
    for (int rep = 0; rep < 10; ++rep) {
      PenaltySpec spec = testutil::sample_spec(family, rng);
      spec.lambda = rng.uniform(0.05, 0.8);
      Problem problem = testutil::random_problem(rng, 30, 8);
      const FitResult fit = dca_fit(problem, spec, tight_config());
      for (size_t k = 1; k < fit.objective_trace.size(); ++k)
        CHECK(fit.objective_trace[k] <= fit.objective_trace[k - 1] + 1e-10);
      for (Eigen::Index j = 0; j < 8; ++j) {
        CHECK(fit.weights_final[j] >= -1e-15);
        CHECK(fit.weights_final[j] <= spec.lambda + 1e-15);
      }
    }
  }
}

TEST_CASE("fixed point: one more outer iteration moves beta_hat by at most outer_tol") {
  Rng rng(48);
  const SolverConfig config = tight_config();
  for (int rep = 0; rep < 10; ++rep) {
    const PenaltySpec spec = PenaltySpec::scad(0.3, 3.7);
    Problem problem = testutil::random_problem(rng, 40, 10);
    const FitResult fit = dca_fit(problem, spec, config);
    REQUIRE(fit.converged);
    Eigen::VectorXd weights(10);
    for (Eigen::Index j = 0; j < 10; ++j)
      weights[j] = spec.lambda - std::abs(h_derivative(spec, fit.beta_hat[j]));
    const auto next = weighted_l1_solve(problem, weights, fit.beta_hat, config);
    double metric = 0.0;
    for (Eigen::Index j = 0; j < 10; ++j) {
      const double delta = std::abs(next.beta[j] - fit.beta_hat[j]);
      const double m =
          fit.beta_hat[j] != 0.0 ? std::min(delta, delta / std::abs(fit.beta_hat[j])) : delta;
      metric = std::max(metric, m);
    }
    CHECK(metric <= config.outer_tol);
  }
}

TEST_CASE("scale equivariance for scale-free penalties with zero init") {
  Rng rng(49);
  SolverConfig config = tight_config();
  config.init = InitStrategy::Zero;
  for (double c : {0.1, 10.0}) {
    for (auto family : {PenaltyFamily::L1, PenaltyFamily::Scad, PenaltyFamily::Mcp,
                        PenaltyFamily::CappedL1}) {
      PenaltySpec spec = testutil::sample_spec(family, rng);
      spec.lambda = 0.4;
      spec.smoothing = 0.0;
      Problem problem = testutil::random_problem(rng, 30, 8);
      const FitResult base = dca_fit(problem, spec, config);

      Problem scaled = problem;
      scaled.response *= c;
      PenaltySpec scaled_spec = spec;
      scaled_spec.lambda *= c;
      const FitResult rescaled = dca_fit(scaled, scaled_spec, config);
      CHECK((rescaled.beta_hat - c * base.beta_hat).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
}

TEST_CASE("logistic inner solver reaches its KKT tolerance") {
  Rng rng(50);
  Problem problem = testutil::random_problem(rng, 60, 5, LossKind::Logistic);
  const Eigen::VectorXd weights = Eigen::VectorXd::Constant(5, 0.05);
  const auto result =
      weighted_l1_solve(problem, weights, Eigen::VectorXd::Zero(5), tight_config());
  CHECK(result.converged);
  const Eigen::VectorXd grad = loss_gradient(problem, result.beta);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < 5; ++j) {
    if (result.beta[j] != 0.0)
      worst = std::max(worst, std::abs(grad[j] + (result.beta[j] > 0 ? 1.0 : -1.0) * weights[j]));
    else
      worst = std::max(worst, std::max(0.0, std::abs(grad[j]) - weights[j]));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("logistic dca_fit descends and certifies") {
  Rng rng(51);
  Problem problem = testutil::random_problem(rng, 80, 6, LossKind::Logistic);
  const PenaltySpec spec = PenaltySpec::mcp(0.1, 3.0);
  const FitResult fit = dca_fit(problem, spec, tight_config());
  CHECK(fit.converged);
  for (size_t k = 1; k < fit.objective_trace.size(); ++k)
    CHECK(fit.objective_trace[k] <= fit.objective_trace[k - 1] + 1e-10);
}

TEST_CASE("iteration caps propagate converged = false") {
  Rng rng(52);
  Problem problem = testutil::random_problem(rng, 30, 10);
  SolverConfig config = tight_config();
  config.max_inner_iters = 1;
  const FitResult fit = dca_fit(problem, PenaltySpec::scad(0.2, 3.7), config);
  CHECK_FALSE(fit.converged);
}

TEST_CASE("non-finite objective raises NumericalFailure with the trace") {
  Rng rng(53);
  Problem problem = testutil::random_problem(rng, 10, 3);
  SolverConfig config = tight_config();
  config.init = InitStrategy::Custom;
  config.custom_init = Eigen::VectorXd::Constant(3, 1e200);
  CHECK_THROWS_AS(dca_fit(problem, PenaltySpec::l1(1.0), config), NumericalFailure);
}

TEST_CASE("input validation") {
  Rng rng(54);
  Problem problem = testutil::random_problem(rng, 10, 3);
  SolverConfig config = tight_config();
  CHECK_THROWS_AS(weighted_l1_solve(problem, Eigen::VectorXd::Constant(3, -0.1),
                                    Eigen::VectorXd::Zero(3), config),
                  ParameterError);
  CHECK_THROWS_AS(weighted_l1_solve(problem, Eigen::VectorXd::Zero(2),
                                    Eigen::VectorXd::Zero(3), config),
                  ShapeError);
  config.outer_tol = 0.0;
  CHECK_THROWS_AS(dca_fit(problem, PenaltySpec::l1(1.0), config), ParameterError);
}
