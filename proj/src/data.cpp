#include "dcreg/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dcreg/errors.hpp"
#include "dcreg/rng.hpp"

namespace dcreg {

void SyntheticSpec::validate() const {
  if (n < 1 || p < 1) throw ParameterError("n and p must be >= 1");
  if (s < 1 || s > p) throw ParameterError("sparsity s must satisfy 1 <= s <= p");
  if (!(signal_min <= signal_max)) throw ParameterError("signal_min must be <= signal_max");
  if (signal_min < 0.0) throw ParameterError("signal magnitudes must be nonnegative");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ParameterError("sigma must be >= 0");
  if (!(design_correlation >= 0.0 && design_correlation < 1.0))
    throw ParameterError("design_correlation must lie in [0, 1)");
}

bool SyntheticSpec::standardize_effective() const {
  if (standardize == Standardize::Auto) return loss == LossKind::SquaredError;
  return standardize == Standardize::On;
}

std::pair<Problem, SyntheticTruth> generate(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed, /*stream=*/0);

  // Support: partial Fisher-Yates over 0..p-1, then sorted.
  std::vector<Eigen::Index> indices(spec.p);
  std::iota(indices.begin(), indices.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < spec.s; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(spec.p - i)));
    std::swap(indices[i], indices[j]);
  }
  std::vector<Eigen::Index> support(indices.begin(), indices.begin() + spec.s);
  std::sort(support.begin(), support.end());

  Eigen::VectorXd beta_star = Eigen::VectorXd::Zero(spec.p);
  for (Eigen::Index j : support)
    beta_star[j] = rng.rademacher() * rng.uniform(spec.signal_min, spec.signal_max);

  // AR(1) rows give exactly the Toeplitz rho^|i-j| covariance.
  const double rho = spec.design_correlation;
  const double innov = std::sqrt(1.0 - rho * rho);
  Eigen::MatrixXd design(spec.n, spec.p);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    design(i, 0) = rng.normal();
    for (Eigen::Index j = 1; j < spec.p; ++j)
      design(i, j) = rho * design(i, j - 1) + innov * rng.normal();
  }

  if (spec.standardize_effective()) {
    for (Eigen::Index j = 0; j < spec.p; ++j) {
      const double scale = std::sqrt(design.col(j).squaredNorm() / static_cast<double>(spec.n));
      if (scale > 0.0) design.col(j) /= scale;
    }
  }

  Eigen::VectorXd response(spec.n);
  const Eigen::VectorXd linear = design * beta_star;
  if (spec.loss == LossKind::SquaredError) {
    for (Eigen::Index i = 0; i < spec.n; ++i) {
      const double noise =
          spec.noise == NoiseKind::Gaussian ? rng.normal() : rng.rademacher();
      response[i] = linear[i] + spec.sigma * noise;
    }
  } else {
    for (Eigen::Index i = 0; i < spec.n; ++i)
      response[i] = rng.uniform() < logistic_mean(linear[i]) ? 1.0 : 0.0;
  }

  Problem problem{std::move(design), std::move(response), spec.loss};
  SyntheticTruth truth{std::move(beta_star), std::move(support), spec.sigma, spec};
  return {std::move(problem), std::move(truth)};
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& field, long line_no) {
  size_t pos = 0;
  double value;
  try {
    value = std::stod(field, &pos);
  } catch (const std::exception&) {
    throw ParseError("cannot parse numeric field '" + field + "'", line_no);
  }
  while (pos < field.size() && std::isspace(static_cast<unsigned char>(field[pos]))) ++pos;
  if (pos != field.size())
    throw ParseError("trailing characters in numeric field '" + field + "'", line_no);
  return value;
}

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

Problem read_problem_csv(const std::string& path, LossKind loss) {
  auto in = open_for_read(path);
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty file '" + path + "'", 1);
  ++line_no;
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "y")
    throw ParseError("expected header 'y,x1,...,xp'", line_no);
  const size_t cols = header.size();

  std::vector<double> values;
  long rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != cols)
      throw ShapeError("row has " + std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(cols) + " (line " + std::to_string(line_no) + ")");
    for (const auto& f : fields) values.push_back(parse_number(f, line_no));
    ++rows;
  }
  if (rows == 0) throw ShapeError("no data rows in '" + path + "' (n=0)");

  Problem problem;
  problem.loss = loss;
  problem.response.resize(rows);
  problem.design.resize(rows, static_cast<Eigen::Index>(cols - 1));
  for (long i = 0; i < rows; ++i) {
    problem.response[i] = values[static_cast<size_t>(i) * cols];
    for (size_t j = 1; j < cols; ++j)
      problem.design(i, static_cast<Eigen::Index>(j - 1)) = values[static_cast<size_t>(i) * cols + j];
  }
  problem.validate();
  return problem;
}

void write_problem_csv(const std::string& path, const Problem& problem) {
  problem.validate();
  auto out = open_for_write(path);
  out << "y";
  for (Eigen::Index j = 0; j < problem.p(); ++j) out << ",x" << (j + 1);
  out << "\n";
  for (Eigen::Index i = 0; i < problem.n(); ++i) {
    out << format_double(problem.response[i]);
    for (Eigen::Index j = 0; j < problem.p(); ++j) out << "," << format_double(problem.design(i, j));
    out << "\n";
  }
}

void write_truth_csv(const std::string& path, const SyntheticTruth& truth) {
  auto out = open_for_write(path);
  out << "j,beta_star,in_support,sigma,seed\n";
  std::vector<bool> in_support(truth.beta_star.size(), false);
  for (Eigen::Index j : truth.support) in_support[static_cast<size_t>(j)] = true;
  for (Eigen::Index j = 0; j < truth.beta_star.size(); ++j) {
    out << (j + 1) << "," << format_double(truth.beta_star[j]) << ","
        << (in_support[static_cast<size_t>(j)] ? 1 : 0) << "," << format_double(truth.sigma)
        << "," << truth.spec.seed << "\n";
  }
}

SyntheticTruth read_truth_csv(const std::string& path) {
  auto in = open_for_read(path);
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty truth file '" + path + "'", 1);
  ++line_no;
  if (split_csv_line(line).size() != 5)
    throw ParseError("expected header 'j,beta_star,in_support,sigma,seed'", line_no);

  SyntheticTruth truth;
  std::vector<double> betas;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 5) throw ShapeError("truth row must have 5 fields (line " +
                                             std::to_string(line_no) + ")");
    betas.push_back(parse_number(fields[1], line_no));
    if (parse_number(fields[2], line_no) != 0.0)
      truth.support.push_back(static_cast<Eigen::Index>(betas.size()) - 1);
    truth.sigma = parse_number(fields[3], line_no);
    truth.spec.seed = static_cast<std::uint64_t>(parse_number(fields[4], line_no));
  }
  if (betas.empty()) throw ShapeError("no rows in truth file '" + path + "'");
  truth.beta_star = Eigen::Map<Eigen::VectorXd>(betas.data(), static_cast<Eigen::Index>(betas.size()));
  return truth;
}

Eigen::VectorXd read_beta_csv(const std::string& path) {
  auto in = open_for_read(path);
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty coefficient file '" + path + "'", 1);
  ++line_no;
  std::vector<double> betas;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2)
      throw ShapeError("coefficient row must have 2 fields (line " + std::to_string(line_no) + ")");
    betas.push_back(parse_number(fields[1], line_no));
  }
  if (betas.empty()) throw ShapeError("no rows in coefficient file '" + path + "'");
  return Eigen::Map<Eigen::VectorXd>(betas.data(), static_cast<Eigen::Index>(betas.size()));
}

void write_beta_csv(const std::string& path, const Eigen::VectorXd& beta) {
  auto out = open_for_write(path);
  out << "j,beta\n";
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    out << (j + 1) << "," << format_double(beta[j]) << "\n";
}

}  // namespace dcreg
