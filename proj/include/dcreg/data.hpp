#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dcreg/losses.hpp"

namespace dcreg {

enum class NoiseKind { Gaussian, Rademacher };

// Three-valued standardization switch; Auto means on for squared error and
// off for logistic.
enum class Standardize { Auto, On, Off };

struct SyntheticSpec {
  Eigen::Index n = 100;
  Eigen::Index p = 10;
  Eigen::Index s = 2;        // ||beta*||_0
  double signal_min = 1.0;   // nonzero |beta*| range
  double signal_max = 1.0;
  double sigma = 1.0;        // noise scale
  double design_correlation = 0.0;  // Toeplitz rho^|i-j| column correlation
  NoiseKind noise = NoiseKind::Gaussian;
  LossKind loss = LossKind::SquaredError;
  std::uint64_t seed = 0;
  Standardize standardize = Standardize::Auto;

  void validate() const;
  bool standardize_effective() const;
};

struct SyntheticTruth {
  Eigen::VectorXd beta_star;
  std::vector<Eigen::Index> support;  // sorted
  double sigma = 0.0;
  SyntheticSpec spec;
};

// Rows of X are i.i.d. N(0, Sigma) with Sigma_{jk} = rho^|j-k| (AR(1)
// construction), columns optionally rescaled to ||x_j||^2/n = 1; support drawn
// uniformly, nonzero magnitudes uniform on [signal_min, signal_max] with
// random signs. Logistic responses are Bernoulli(sigmoid(x_i^T beta*)).
// Bit-reproducible for a fixed spec.
std::pair<Problem, SyntheticTruth> generate(const SyntheticSpec& spec);

// Dataset CSV: header "y,x1,...,xp", one row per observation, '.' decimal,
// LF line endings, 17 significant digits.
Problem read_problem_csv(const std::string& path, LossKind loss = LossKind::SquaredError);
void write_problem_csv(const std::string& path, const Problem& problem);

// Truth sidecar CSV: header "j,beta_star,in_support,sigma,seed" with the
// scalar columns repeated on every row.
SyntheticTruth read_truth_csv(const std::string& path);
void write_truth_csv(const std::string& path, const SyntheticTruth& truth);

// Coefficient vector CSV: header "j,beta".
Eigen::VectorXd read_beta_csv(const std::string& path);
void write_beta_csv(const std::string& path, const Eigen::VectorXd& beta);

// Shortest decimal form that round-trips a double (17 significant digits).
std::string format_double(double x);

}  // namespace dcreg
