// dcsparse: batch front end for DC-penalized sparse regression.
// Subcommands: fit, synth, check, experiment, penalty-curve.
// Exit codes: 0 success, 1 input error, 2 iteration-cap termination.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>

#include "dcreg/data.hpp"
#include "dcreg/errors.hpp"
#include "dcreg/oracle.hpp"
#include "dcreg/penalties.hpp"
#include "dcreg/solver.hpp"
#include "dcreg/stationarity.hpp"
#include "dcreg/theory.hpp"

namespace {

using namespace dcreg;

struct PenaltyFlags {
  std::string family = "l1";
  double lambda = 1.0;
  double gamma = -1.0;  // < 0: family default
  double a = 1.0;
  double offset = 1.0;
  double smooth_mu = 0.0;
};

void add_penalty_options(CLI::App* cmd, PenaltyFlags& flags) {
  cmd->add_option("--penalty", flags.family, "penalty family")
      ->check(CLI::IsMember({"l1", "scad", "mcp", "capped-l1", "transformed-l1", "log"}));
  cmd->add_option("--lambda", flags.lambda, "regularization weight (>= 0)");
  cmd->add_option("--gamma", flags.gamma, "shape for scad/mcp/capped-l1");
  cmd->add_option("--a", flags.a, "shape for transformed-l1");
  cmd->add_option("--offset", flags.offset, "log-penalty offset");
  cmd->add_option("--smooth-mu", flags.smooth_mu, "capped-l1 smoothing width (0 = none)");
}

PenaltySpec make_penalty(const PenaltyFlags& flags) {
  PenaltySpec spec;
  if (flags.family == "l1") {
    spec = PenaltySpec::l1(flags.lambda);
  } else if (flags.family == "scad") {
    spec = PenaltySpec::scad(flags.lambda, flags.gamma < 0 ? 3.7 : flags.gamma);
  } else if (flags.family == "mcp") {
    spec = PenaltySpec::mcp(flags.lambda, flags.gamma < 0 ? 3.0 : flags.gamma);
  } else if (flags.family == "capped-l1") {
    spec = PenaltySpec::capped_l1(flags.lambda, flags.gamma < 0 ? 2.0 : flags.gamma,
                                  flags.smooth_mu);
  } else if (flags.family == "transformed-l1") {
    spec = PenaltySpec::transformed_l1(flags.lambda, flags.a);
  } else if (flags.family == "log") {
    spec = PenaltySpec::logarithmic(flags.lambda, flags.offset);
  } else {
    throw ParameterError("unknown penalty family '" + flags.family + "'");
  }
  spec.validate();
  return spec;
}

struct SolverFlags {
  double outer_tol = 1e-8;
  double inner_tol = 1e-10;
  int max_outer = 100;
  long max_inner = 100000;
  std::string init = "lasso";
};

void add_solver_options(CLI::App* cmd, SolverFlags& flags) {
  cmd->add_option("--outer-tol", flags.outer_tol, "outer stopping tolerance");
  cmd->add_option("--inner-tol", flags.inner_tol, "inner KKT tolerance");
  cmd->add_option("--max-outer", flags.max_outer, "outer iteration cap");
  cmd->add_option("--max-inner", flags.max_inner, "inner iteration cap");
  cmd->add_option("--init", flags.init, "initialization")
      ->check(CLI::IsMember({"zero", "lasso"}));
}

SolverConfig make_solver(const SolverFlags& flags) {
  SolverConfig config;
  config.outer_tol = flags.outer_tol;
  config.inner_tol = flags.inner_tol;
  config.max_outer_iters = flags.max_outer;
  config.max_inner_iters = flags.max_inner;
  config.init = flags.init == "zero" ? InitStrategy::Zero : InitStrategy::LassoWarmStart;
  return config;
}

LossKind parse_loss(const std::string& name) {
  if (name == "squared") return LossKind::SquaredError;
  if (name == "logistic") return LossKind::Logistic;
  throw ParameterError("unknown loss '" + name + "'");
}

int env_thread_cap() {
  const char* raw = std::getenv("DC_SPARSE_THREADS");
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (raw == nullptr) return static_cast<int>(hw);
  try {
    const int parsed = std::stoi(raw);
    if (parsed >= 1) return parsed;
  } catch (const std::exception&) {
  }
  return static_cast<int>(hw);
}

// ---- fit ------------------------------------------------------------------

int cmd_fit(const std::string& data_path, const std::string& loss_name,
            const PenaltyFlags& penalty_flags, const SolverFlags& solver_flags,
            const std::string& out_path) {
  const Problem problem = read_problem_csv(data_path, parse_loss(loss_name));
  const PenaltySpec spec = make_penalty(penalty_flags);
  const SolverConfig config = make_solver(solver_flags);

  const FitResult fit = dca_fit(problem, spec, config);
  const StationarityReport report =
      check_d_stationary(problem, spec, fit.beta_hat, 10.0 * config.inner_tol);

  std::cout << "j,beta\n";
  for (Eigen::Index j = 0; j < fit.beta_hat.size(); ++j)
    std::cout << (j + 1) << "," << format_double(fit.beta_hat[j]) << "\n";
  std::cout << "objective_trace:";
  for (double f : fit.objective_trace) std::cout << " " << format_double(f);
  std::cout << "\n";
  std::cout << "outer_iters: " << fit.outer_iters << "\n";
  std::cout << "inner_iters_total: " << fit.inner_iters_total << "\n";
  std::cout << "max_violation: " << format_double(report.max_violation) << "\n";
  std::cout << "is_d_stationary: " << (report.is_d_stationary ? 1 : 0) << "\n";
  std::cout << "converged: " << (fit.converged ? 1 : 0) << "\n";

  if (!out_path.empty()) write_beta_csv(out_path, fit.beta_hat);
  return fit.converged ? 0 : 2;
}

// ---- synth ----------------------------------------------------------------

int cmd_synth(const SyntheticSpec& spec, const std::string& out_path,
              std::string truth_path) {
  auto [problem, truth] = generate(spec);
  write_problem_csv(out_path, problem);
  if (truth_path.empty()) truth_path = out_path + ".truth.csv";
  write_truth_csv(truth_path, truth);
  std::cout << "dataset: " << out_path << "\n";
  std::cout << "truth: " << truth_path << "\n";
  return 0;
}

// ---- check ----------------------------------------------------------------

int cmd_check(const std::string& data_path, const std::string& loss_name,
              const std::string& fit_path, const std::string& truth_path, bool bounds,
              double c, int re_samples, std::uint64_t seed, double tol,
              const PenaltyFlags& penalty_flags, const std::string& out_path) {
  const Problem problem = read_problem_csv(data_path, parse_loss(loss_name));
  const Eigen::VectorXd beta_hat = read_beta_csv(fit_path);
  if (beta_hat.size() != problem.p())
    throw ShapeError("fitted coefficient length does not match dataset dimension");
  const PenaltySpec spec = make_penalty(penalty_flags);

  const double use_tol = tol > 0.0 ? tol : default_stationarity_tol(problem, beta_hat);
  const StationarityReport report = check_d_stationary(problem, spec, beta_hat, use_tol);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::binary);
    if (!file) throw ParseError("cannot open '" + out_path + "' for writing");
    out = &file;
  }
  *out << "j,beta,residual,certificate\n";
  for (Eigen::Index j = 0; j < beta_hat.size(); ++j)
    *out << (j + 1) << "," << format_double(beta_hat[j]) << ","
         << format_double(report.residuals[j]) << ","
         << format_double(report.certificate[j]) << "\n";

  std::cout << "max_violation: " << format_double(report.max_violation) << "\n";
  std::cout << "is_d_stationary: " << (report.is_d_stationary ? 1 : 0) << "\n";
  std::cout << "strict_dual_feasible: " << (report.strict_dual_feasible ? 1 : 0) << "\n";

  if (bounds) {
    if (truth_path.empty()) throw ParameterError("--bounds requires --truth");
    const SyntheticTruth truth = read_truth_csv(truth_path);
    if (truth.beta_star.size() != problem.p())
      throw ShapeError("truth length does not match dataset dimension");
    FitResult fit;
    fit.beta_hat = beta_hat;
    const ConeSpec cone = ConeSpec::linear(truth.support, c);
    const double gamma = estimate_re_constant(problem, cone, re_samples, seed);
    const BoundReport est = check_estimation_bound(fit, truth, spec.lambda, gamma);
    const PredictionBound pred =
        check_prediction_bound(problem, fit, truth, spec.lambda, gamma);
    const Assumption8Audit audit =
        audit_assumption8(problem, beta_hat, &truth.support, c, spec.lambda, &truth.beta_star);
    std::cout << "bound,observed,bound_value,satisfied\n";
    std::cout << "estimation," << format_double(est.observed) << "," << format_double(est.bound)
              << "," << (est.satisfied ? 1 : 0) << "\n";
    std::cout << "prediction_proof," << format_double(pred.proof_form.observed) << ","
              << format_double(pred.proof_form.bound) << ","
              << (pred.proof_form.satisfied ? 1 : 0) << "\n";
    std::cout << "prediction_stated," << format_double(pred.stated_form.observed) << ","
              << format_double(pred.stated_form.bound) << ","
              << (pred.stated_form.satisfied ? 1 : 0) << "\n";
    std::cout << "re_gamma: " << format_double(gamma) << "\n";
    std::cout << "assumption8: " << (audit.holds ? 1 : 0) << "\n";
  }
  return 0;
}

// ---- experiment -----------------------------------------------------------

std::map<std::string, std::string> parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    size_t start = 0;
    while (start < line.size() && std::isspace(static_cast<unsigned char>(line[start]))) ++start;
    line = line.substr(start);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value in config", line_no);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

int cmd_experiment(const std::string& config_path) {
  const auto kv = parse_config(config_path);
  const auto get = [&](const std::string& key, const std::string& fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  };
  const auto require = [&](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ParameterError("config key '" + key + "' is required");
    return it->second;
  };

  ExperimentPlan plan;
  plan.generator.n = std::stol(require("n"));
  plan.generator.p = std::stol(require("p"));
  plan.generator.s = std::stol(require("s"));
  plan.generator.sigma = std::stod(get("sigma", "1.0"));
  plan.generator.signal_min = std::stod(require("signal_min"));
  plan.generator.signal_max = std::stod(require("signal_max"));
  plan.generator.design_correlation = std::stod(get("rho", "0"));
  plan.generator.noise =
      get("noise", "gaussian") == "rademacher" ? NoiseKind::Rademacher : NoiseKind::Gaussian;
  plan.generator.loss = parse_loss(get("loss", "squared"));
  const std::string standardize = get("standardize", "auto");
  plan.generator.standardize = standardize == "on"    ? Standardize::On
                               : standardize == "off" ? Standardize::Off
                                                      : Standardize::Auto;
  plan.seed = std::stoull(get("seed", "0"));
  plan.generator.seed = plan.seed;

  PenaltyFlags penalty_flags;
  penalty_flags.family = get("penalty", "l1");
  if (kv.count("lambda")) {
    penalty_flags.lambda = std::stod(kv.at("lambda"));
  } else if (kv.count("tau")) {
    penalty_flags.lambda = select_lambda(plan.generator.sigma, std::stod(kv.at("tau")),
                                         plan.generator.n, plan.generator.p);
  } else {
    throw ParameterError("config requires either lambda or tau");
  }
  if (kv.count("gamma")) penalty_flags.gamma = std::stod(kv.at("gamma"));
  if (kv.count("a")) penalty_flags.a = std::stod(kv.at("a"));
  if (kv.count("offset")) penalty_flags.offset = std::stod(kv.at("offset"));
  if (kv.count("smooth_mu")) penalty_flags.smooth_mu = std::stod(kv.at("smooth_mu"));
  plan.penalty = make_penalty(penalty_flags);

  SolverFlags solver_flags;
  solver_flags.outer_tol = std::stod(get("outer_tol", "1e-8"));
  solver_flags.inner_tol = std::stod(get("inner_tol", "1e-10"));
  solver_flags.max_outer = std::stoi(get("max_outer", "100"));
  solver_flags.max_inner = std::stol(get("max_inner", "100000"));
  solver_flags.init = get("init", "lasso");
  plan.solver = make_solver(solver_flags);

  plan.replicates = std::stoi(require("replicates"));
  plan.c = std::stod(get("c", "0.5"));
  plan.re_samples = std::stoi(get("re_samples", "2000"));
  plan.threads = std::min(env_thread_cap(), std::max(1, plan.replicates));

  const ExperimentResult result = run_experiment(plan);
  const std::string out = require("out");
  write_experiment_csv(out, result);

  std::cout << "replicates: " << plan.replicates << "\n";
  std::cout << "failures: " << result.failures << "\n";
  std::cout << "recovery_rate: " << format_double(result.recovery_rate) << "\n";
  std::cout << "oracle_equality_rate: " << format_double(result.oracle_equality_rate) << "\n";
  std::cout << "estimation_bound_rate: " << format_double(result.estimation_bound_rate) << "\n";
  std::cout << "glm_bound_rate: " << format_double(result.glm_bound_rate) << "\n";
  std::cout << "out: " << out << "\n";
  return 0;
}

// ---- penalty-curve ---------------------------------------------------------

int cmd_penalty_curve(const PenaltyFlags& penalty_flags, double grid_min, double grid_max,
                      long grid_points, const std::string& out_path) {
  if (!(grid_min < grid_max)) throw ParameterError("grid min must be < grid max");
  if (grid_points < 2) throw ParameterError("grid needs at least 2 points");
  const PenaltySpec spec = make_penalty(penalty_flags);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::binary);
    if (!file) throw ParseError("cannot open '" + out_path + "' for writing");
    out = &file;
  }
  *out << "t,p,p_prime\n";
  for (long i = 0; i < grid_points; ++i) {
    const double t =
        grid_min + (grid_max - grid_min) * static_cast<double>(i) / (grid_points - 1);
    *out << format_double(t) << "," << format_double(penalty_value(spec, t)) << ","
         << format_double(penalty_derivative(spec, t)) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DC-penalized sparse regression toolkit"};
  app.require_subcommand(1);

  // fit
  auto* fit = app.add_subcommand("fit", "fit one dataset");
  std::string fit_data, fit_loss = "squared", fit_out;
  PenaltyFlags fit_penalty;
  SolverFlags fit_solver;
  fit->add_option("data", fit_data, "dataset CSV (y,x1,...,xp)")->required();
  fit->add_option("--loss", fit_loss, "loss kind")->check(CLI::IsMember({"squared", "logistic"}));
  fit->add_option("--out", fit_out, "write beta_hat CSV here");
  add_penalty_options(fit, fit_penalty);
  add_solver_options(fit, fit_solver);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  SyntheticSpec synth_spec;
  std::string synth_out, synth_truth, synth_loss = "squared", synth_noise = "gaussian",
                          synth_standardize = "auto";
  synth->add_option("--n", synth_spec.n, "observations")->required();
  synth->add_option("--p", synth_spec.p, "predictors")->required();
  synth->add_option("--s", synth_spec.s, "support size")->required();
  synth->add_option("--signal-min", synth_spec.signal_min, "min nonzero |beta*|");
  synth->add_option("--signal-max", synth_spec.signal_max, "max nonzero |beta*|");
  synth->add_option("--sigma", synth_spec.sigma, "noise scale");
  synth->add_option("--rho", synth_spec.design_correlation, "Toeplitz column correlation");
  synth->add_option("--noise", synth_noise, "noise family")
      ->check(CLI::IsMember({"gaussian", "rademacher"}));
  synth->add_option("--loss", synth_loss, "loss kind")
      ->check(CLI::IsMember({"squared", "logistic"}));
  synth->add_option("--standardize", synth_standardize, "column standardization")
      ->check(CLI::IsMember({"auto", "on", "off"}));
  synth->add_option("--seed", synth_spec.seed, "generator seed");
  synth->add_option("--out", synth_out, "dataset CSV path")->required();
  synth->add_option("--truth", synth_truth, "truth sidecar path (default: <out>.truth.csv)");

  // check
  auto* check = app.add_subcommand("check", "stationarity and bound reports");
  std::string check_data, check_fit, check_truth, check_loss = "squared", check_out;
  bool check_bounds = false;
  double check_c = 0.5, check_tol = -1.0;
  int check_re_samples = 2000;
  std::uint64_t check_seed = 0;
  PenaltyFlags check_penalty;
  check->add_option("data", check_data, "dataset CSV")->required();
  check->add_option("--fit", check_fit, "beta_hat CSV from 'fit --out'")->required();
  check->add_option("--truth", check_truth, "truth sidecar CSV");
  check->add_option("--loss", check_loss, "loss kind")
      ->check(CLI::IsMember({"squared", "logistic"}));
  check->add_flag("--bounds", check_bounds, "also evaluate the error bounds (needs --truth)");
  check->add_option("--c", check_c, "cone / assumption-8 constant");
  check->add_option("--re-samples", check_re_samples, "Monte Carlo cone samples");
  check->add_option("--seed", check_seed, "seed for the RE estimate");
  check->add_option("--tol", check_tol, "stationarity tolerance (default: scaled 1e-6)");
  check->add_option("--out", check_out, "write the stationarity CSV here");
  add_penalty_options(check, check_penalty);

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run a replicated experiment");
  std::string experiment_config;
  experiment->add_option("config", experiment_config, "key=value config file")->required();

  // penalty-curve
  auto* curve = app.add_subcommand("penalty-curve", "emit (t, p(t), p'(t)) samples");
  PenaltyFlags curve_penalty;
  double curve_min = -2.0, curve_max = 2.0;
  long curve_points = 401;
  std::string curve_out;
  curve->add_option("--grid-min", curve_min, "grid start");
  curve->add_option("--grid-max", curve_max, "grid end");
  curve->add_option("--grid-points", curve_points, "number of samples");
  curve->add_option("--out", curve_out, "output CSV (default stdout)");
  add_penalty_options(curve, curve_penalty);

  try {
    app.parse(argc, argv);
    if (fit->parsed()) return cmd_fit(fit_data, fit_loss, fit_penalty, fit_solver, fit_out);
    if (synth->parsed()) {
      synth_spec.loss = parse_loss(synth_loss);
      synth_spec.noise =
          synth_noise == "rademacher" ? NoiseKind::Rademacher : NoiseKind::Gaussian;
      synth_spec.standardize = synth_standardize == "on"    ? Standardize::On
                               : synth_standardize == "off" ? Standardize::Off
                                                            : Standardize::Auto;
      return cmd_synth(synth_spec, synth_out, synth_truth);
    }
    if (check->parsed())
      return cmd_check(check_data, check_loss, check_fit, check_truth, check_bounds, check_c,
                       check_re_samples, check_seed, check_tol, check_penalty, check_out);
    if (experiment->parsed()) return cmd_experiment(experiment_config);
    if (curve->parsed())
      return cmd_penalty_curve(curve_penalty, curve_min, curve_max, curve_points, curve_out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
