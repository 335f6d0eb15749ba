#include "dcreg/theory.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "dcreg/errors.hpp"
#include "dcreg/rng.hpp"

namespace dcreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_cone_c(double c) {
  if (!(c > 0.0 && c < 1.0)) throw ParameterError("cone constant c must lie in (0,1)");
}

std::vector<bool> support_mask(const std::vector<Eigen::Index>& support, Eigen::Index p) {
  std::vector<bool> mask(static_cast<size_t>(p), false);
  for (Eigen::Index j : support) {
    if (j < 0 || j >= p) throw ParameterError("support index out of range");
    mask[static_cast<size_t>(j)] = true;
  }
  return mask;
}

}  // namespace

ConeSpec ConeSpec::linear(std::vector<Eigen::Index> support, double c) {
  validate_cone_c(c);
  return {std::move(support), c, 5.0 / (2.0 * c)};
}

ConeSpec ConeSpec::glm(std::vector<Eigen::Index> support, double c) {
  validate_cone_c(c);
  return {std::move(support), c, (4.0 + c) / c};
}

bool cone_membership(const Eigen::VectorXd& v, const ConeSpec& cone) {
  const auto mask = support_mask(cone.support, v.size());
  double on = 0.0, off = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j)
    (mask[static_cast<size_t>(j)] ? on : off) += std::abs(v[j]);
  return off <= cone.ratio * on;
}

double estimate_re_constant(const Problem& problem, const ConeSpec& cone, int samples,
                            std::uint64_t seed) {
  problem.validate();
  if (samples < 1) throw ParameterError("samples must be >= 1");
  if (cone.support.empty()) throw ParameterError("cone support must be nonempty");
  const Eigen::Index p = problem.p();
  const auto mask = support_mask(cone.support, p);
  std::vector<Eigen::Index> off_support;
  for (Eigen::Index j = 0; j < p; ++j)
    if (!mask[static_cast<size_t>(j)]) off_support.push_back(j);

  Rng rng(seed, /*stream=*/1);
  const double inv_n = 1.0 / static_cast<double>(problem.n());
  Eigen::VectorXd v(p);
  double best = kInf;
  for (int it = 0; it < samples; ++it) {
    v.setZero();
    double on_sq = 0.0, on_l1 = 0.0;
    for (Eigen::Index j : cone.support) {
      v[j] = rng.normal();
      on_sq += v[j] * v[j];
    }
    const double on_norm = std::sqrt(on_sq);
    if (on_norm == 0.0) continue;
    for (Eigen::Index j : cone.support) {
      v[j] /= on_norm;
      on_l1 += std::abs(v[j]);
    }
    if (!off_support.empty()) {
      const double target_l1 = rng.uniform() * cone.ratio * on_l1;
      double total = 0.0;
      for (Eigen::Index j : off_support) {
        double w = -std::log(1.0 - rng.uniform());
        w = std::max(w, 1e-300);
        v[j] = w;
        total += w;
      }
      for (Eigen::Index j : off_support) v[j] = rng.rademacher() * v[j] / total * target_l1;
    }
    const double norm = v.norm();
    if (norm == 0.0) continue;
    v /= norm;
    const double quad = (problem.design * v).squaredNorm() * inv_n;
    best = std::min(best, quad);
  }
  return best;
}

BoundReport make_bound_report(double observed, double bound) {
  BoundReport report;
  report.observed = observed;
  report.bound = bound;
  report.satisfied = observed <= bound;
  if (bound > 0.0)
    report.slack_ratio = observed / bound;
  else
    report.slack_ratio = observed == 0.0 ? 0.0 : kInf;
  return report;
}

BoundReport check_estimation_bound(const FitResult& fit, const SyntheticTruth& truth,
                                   double lambda, double gamma) {
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
  const double s = static_cast<double>(truth.support.size());
  const double observed = (fit.beta_hat - truth.beta_star).norm();
  const double bound = 5.0 / (2.0 * gamma) * lambda * std::sqrt(s);
  return make_bound_report(observed, bound);
}

PredictionBound check_prediction_bound(const Problem& problem, const FitResult& fit,
                                       const SyntheticTruth& truth, double lambda, double gamma) {
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
  const double s = static_cast<double>(truth.support.size());
  const double observed =
      (problem.design * (truth.beta_star - fit.beta_hat)).squaredNorm() /
      static_cast<double>(problem.n());
  const double factor = 2.5 * lambda * 2.5 * lambda / gamma;
  return {make_bound_report(observed, factor * s), make_bound_report(observed, factor * std::sqrt(s))};
}

double select_lambda(double sigma, double tau, Eigen::Index n, Eigen::Index p) {
  if (!(sigma >= 0.0)) throw ParameterError("sigma must be >= 0");
  if (!(tau >= 2.0)) throw ParameterError("tau must be >= 2");
  if (n < 1 || p < 2) throw ParameterError("select_lambda requires n >= 1 and p >= 2");
  return 2.0 * sigma *
         std::sqrt(tau * std::log(static_cast<double>(p)) / static_cast<double>(n));
}

BoundReport check_glm_bound(const FitResult& fit, const SyntheticTruth& truth, double lambda,
                            double gamma, double eta_minus, double c) {
  validate_cone_c(c);
  if (!(gamma > eta_minus))
    throw RegimeError("RSC margin gamma - eta_minus must be positive");
  const double s = static_cast<double>(truth.support.size());
  const double observed = (fit.beta_hat - truth.beta_star).norm();
  const double bound = (4.0 + c) * lambda / (2.0 * (gamma - eta_minus)) * std::sqrt(s);
  return make_bound_report(observed, bound);
}

double existence_ball(const SyntheticTruth& truth, double lambda, double c,
                      const PenaltySpec& spec) {
  validate_cone_c(c);
  spec.validate();
  const double target = (1.0 - c) * lambda;
  const double cap = c * lambda * std::sqrt(static_cast<double>(truth.support.size()));
  if (target <= 0.0) return std::min(cap, 0.0);

  // h' is nondecreasing on [0, inf); bracket then bisect for the smallest
  // t with h'(t) >= target.
  double hi = std::max(1.0, lambda);
  double r0 = kInf;
  for (int i = 0; i < 1100 && hi < 1e300; ++i) {
    if (h_derivative(spec, hi) >= target) {
      r0 = hi;
      break;
    }
    hi *= 2.0;
  }
  if (std::isfinite(r0)) {
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + r0);
      if (h_derivative(spec, mid) >= target)
        r0 = mid;
      else
        lo = mid;
    }
  }
  return std::min(cap, r0);
}

namespace {

ReplicateRecord run_replicate(const ExperimentPlan& plan, int index) {
  ReplicateRecord row;
  row.replicate = index;
  row.seed = plan.seed ^ static_cast<std::uint64_t>(index);

  SyntheticSpec gen = plan.generator;
  gen.seed = row.seed;
  try {
    auto [problem, truth] = generate(gen);
    FitResult fit = dca_fit(problem, plan.penalty, plan.solver);
    row.converged = fit.converged;
    row.outer_iters = fit.outer_iters;
    row.l2_error = (fit.beta_hat - truth.beta_star).norm();
    row.max_violation =
        check_d_stationary(problem, plan.penalty, fit.beta_hat, 10.0 * plan.solver.inner_tol)
            .max_violation;

    row.support_match = true;
    const auto mask = support_mask(truth.support, problem.p());
    for (Eigen::Index j = 0; j < problem.p(); ++j)
      if ((fit.beta_hat[j] != 0.0) != mask[static_cast<size_t>(j)]) {
        row.support_match = false;
        break;
      }

    const double lambda = plan.penalty.lambda;
    if (problem.loss == LossKind::SquaredError) {
      const OracleResult oracle = oracle_fit(problem, truth.support, &truth.beta_star);
      row.linf_vs_oracle = (fit.beta_hat - oracle.beta_oracle).cwiseAbs().maxCoeff();
      row.oracle_equal = row.linf_vs_oracle <= 1e-6;
      row.a8_pass = audit_assumption8(problem, fit.beta_hat, &truth.support, plan.c, lambda,
                                      &truth.beta_star)
                        .holds;
      const ConeSpec cone = ConeSpec::linear(truth.support, plan.c);
      row.cone_member = cone_membership(fit.beta_hat - oracle.beta_oracle, cone);
      if (plan.re_samples > 0) {
        row.re_gamma = estimate_re_constant(problem, cone, plan.re_samples, row.seed);
        row.estimation = check_estimation_bound(fit, truth, lambda, row.re_gamma);
        const PredictionBound pred =
            check_prediction_bound(problem, fit, truth, lambda, row.re_gamma);
        row.prediction_proof = pred.proof_form;
        row.prediction_stated = pred.stated_form;
      }
    } else {
      row.grad_at_truth_inf = loss_gradient(problem, truth.beta_star).cwiseAbs().maxCoeff();
      row.a10_pass = row.grad_at_truth_inf <= lambda / 8.0;
      double hgrad = 0.0;
      for (Eigen::Index j = 0; j < problem.p(); ++j) {
        if (mask[static_cast<size_t>(j)]) continue;
        hgrad = std::max(hgrad, std::abs(h_derivative(plan.penalty, fit.beta_hat[j])));
      }
      row.hgrad_off_support_inf = hgrad;
      row.a11_pass = hgrad <= (1.0 - plan.c) * lambda;
      if (plan.re_samples > 0) {
        const ConeSpec cone = ConeSpec::glm(truth.support, plan.c);
        row.re_gamma = estimate_re_constant(problem, cone, plan.re_samples, row.seed);
        const double eta_minus = dc_profile(plan.penalty).eta_minus;
        row.glm_regime_ok = row.re_gamma > eta_minus;
        if (row.glm_regime_ok)
          row.glm = check_glm_bound(fit, truth, lambda, row.re_gamma, eta_minus, plan.c);
      }
    }
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.failure = e.what();
  }
  return row;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentPlan& plan) {
  if (plan.replicates < 1) throw ParameterError("replicates must be >= 1");
  plan.generator.validate();
  plan.penalty.validate();
  validate_cone_c(plan.c);

  ExperimentResult result;
  result.rows.resize(static_cast<size_t>(plan.replicates));

  const int threads = std::max(1, plan.threads);
  if (threads == 1) {
    for (int r = 0; r < plan.replicates; ++r)
      result.rows[static_cast<size_t>(r)] = run_replicate(plan, r);
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= plan.replicates) return;
        result.rows[static_cast<size_t>(r)] = run_replicate(plan, r);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min(threads, plan.replicates); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Deterministic fold in replicate order.
  int ok = 0, recovered = 0, oracle_eq = 0, est_ok = 0, est_checked = 0;
  int glm_ok = 0, glm_checked = 0;
  for (const auto& row : result.rows) {
    if (!row.ok) {
      ++result.failures;
      continue;
    }
    ++ok;
    if (row.support_match) ++recovered;
    if (row.oracle_equal) ++oracle_eq;
    if (row.re_gamma > 0.0 && plan.generator.loss == LossKind::SquaredError) {
      ++est_checked;
      if (row.estimation.satisfied) ++est_ok;
    }
    if (plan.generator.loss == LossKind::Logistic && row.a10_pass && row.a11_pass &&
        row.glm_regime_ok) {
      ++glm_checked;
      if (row.glm.satisfied) ++glm_ok;
    }
  }
  if (ok > 0) {
    result.recovery_rate = static_cast<double>(recovered) / ok;
    result.oracle_equality_rate = static_cast<double>(oracle_eq) / ok;
  }
  if (est_checked > 0) result.estimation_bound_rate = static_cast<double>(est_ok) / est_checked;
  if (glm_checked > 0) result.glm_bound_rate = static_cast<double>(glm_ok) / glm_checked;
  return result;
}

ExperimentResult support_recovery_experiment(const SyntheticSpec& generator,
                                             const PenaltySpec& penalty,
                                             const SolverConfig& solver, int replicates,
                                             std::uint64_t seed) {
  ExperimentPlan plan;
  plan.generator = generator;
  plan.penalty = penalty;
  plan.solver = solver;
  plan.replicates = replicates;
  plan.seed = seed;
  plan.re_samples = 0;
  plan.threads = 1;
  return run_experiment(plan);
}

void write_experiment_csv(const std::string& path, const ExperimentResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << "row_type,replicate,seed,ok,failure,converged,outer_iters,l2_error,max_violation,"
         "support_match,linf_vs_oracle,oracle_equal,re_gamma,est_observed,est_bound,est_ok,"
         "pred_observed,pred_bound_proof,pred_ok_proof,pred_bound_stated,pred_ok_stated,"
         "a8_pass,cone_member,grad_at_truth_inf,a10_pass,hgrad_off_support_inf,a11_pass,"
         "glm_regime_ok,glm_observed,glm_bound,glm_ok\n";
  const auto b = [](bool v) { return v ? "1" : "0"; };
  for (const auto& r : result.rows) {
    std::string failure = r.failure;
    std::replace(failure.begin(), failure.end(), ',', ';');
    out << "replicate," << r.replicate << "," << r.seed << "," << b(r.ok) << "," << failure << ","
        << b(r.converged) << "," << r.outer_iters << "," << format_double(r.l2_error) << ","
        << format_double(r.max_violation) << "," << b(r.support_match) << ","
        << format_double(r.linf_vs_oracle) << "," << b(r.oracle_equal) << ","
        << format_double(r.re_gamma) << "," << format_double(r.estimation.observed) << ","
        << format_double(r.estimation.bound) << "," << b(r.estimation.satisfied) << ","
        << format_double(r.prediction_proof.observed) << ","
        << format_double(r.prediction_proof.bound) << "," << b(r.prediction_proof.satisfied) << ","
        << format_double(r.prediction_stated.bound) << "," << b(r.prediction_stated.satisfied)
        << "," << b(r.a8_pass) << "," << b(r.cone_member) << ","
        << format_double(r.grad_at_truth_inf) << "," << b(r.a10_pass) << ","
        << format_double(r.hgrad_off_support_inf) << "," << b(r.a11_pass) << ","
        << b(r.glm_regime_ok) << "," << format_double(r.glm.observed) << ","
        << format_double(r.glm.bound) << "," << b(r.glm.satisfied) << "\n";
  }
  const std::string pad(28, ',');  // aggregate rows keep the 31-column layout
  const auto aggregate = [&](const std::string& name, const std::string& value) {
    out << "aggregate," << name << "," << value << pad << "\n";
  };
  aggregate("failures", std::to_string(result.failures));
  aggregate("recovery_rate", format_double(result.recovery_rate));
  aggregate("oracle_equality_rate", format_double(result.oracle_equality_rate));
  aggregate("estimation_bound_rate", format_double(result.estimation_bound_rate));
  aggregate("glm_bound_rate", format_double(result.glm_bound_rate));
}

}  // namespace dcreg
