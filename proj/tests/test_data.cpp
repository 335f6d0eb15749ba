#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dcreg/data.hpp"
#include "dcreg/errors.hpp"

using namespace dcreg;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/dcreg_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

SyntheticSpec base_spec() {
  SyntheticSpec spec;
  spec.n = 50;
  spec.p = 20;
  spec.s = 4;
  spec.signal_min = 1.0;
  spec.signal_max = 3.0;
  spec.sigma = 0.7;
  spec.design_correlation = 0.3;
  spec.seed = 99;
  return spec;
}

}  // namespace

TEST_CASE("noiseless generation reproduces the linear model exactly") {
  SyntheticSpec spec = base_spec();
  spec.sigma = 0.0;
  auto [problem, truth] = generate(spec);
  const Eigen::VectorXd fitted = problem.design * truth.beta_star;
  CHECK((problem.response - fitted).cwiseAbs().maxCoeff() == 0.0);
  CHECK(truth.support.size() == 4);
  for (Eigen::Index j : truth.support) CHECK(truth.beta_star[j] != 0.0);
  Eigen::Index nonzeros = 0;
  for (Eigen::Index j = 0; j < spec.p; ++j)
    if (truth.beta_star[j] != 0.0) ++nonzeros;
  CHECK(nonzeros == spec.s);
}

TEST_CASE("same seed gives bit-identical output") {
  const SyntheticSpec spec = base_spec();
  auto [p1, t1] = generate(spec);
  auto [p2, t2] = generate(spec);
  CHECK(p1.design == p2.design);
  CHECK(p1.response == p2.response);
  CHECK(t1.beta_star == t2.beta_star);
  CHECK(t1.support == t2.support);

  SyntheticSpec other = spec;
  other.seed = 100;
  auto [p3, t3] = generate(other);
  CHECK(p1.response != p3.response);
}

TEST_CASE("standardized columns have unit mean square; raw columns obey the LLN") {
  SyntheticSpec spec = base_spec();
  spec.n = 10000;
  spec.p = 8;
  spec.s = 2;
  spec.standardize = Standardize::On;
  auto [problem, truth] = generate(spec);
  for (Eigen::Index j = 0; j < spec.p; ++j) {
    const double ms = problem.design.col(j).squaredNorm() / static_cast<double>(spec.n);
    CHECK(ms == doctest::Approx(1.0).epsilon(1e-12));
  }

  spec.standardize = Standardize::Off;
  auto [raw, raw_truth] = generate(spec);
  for (Eigen::Index j = 0; j < spec.p; ++j) {
    const double ms = raw.design.col(j).squaredNorm() / static_cast<double>(spec.n);
    CHECK(ms > 0.95);
    CHECK(ms < 1.05);
  }
}

TEST_CASE("noise variance tracks sigma^2") {
  for (NoiseKind noise : {NoiseKind::Gaussian, NoiseKind::Rademacher}) {
    SyntheticSpec spec = base_spec();
    spec.n = 4000;
    spec.sigma = 1.5;
    spec.noise = noise;
    spec.standardize = Standardize::Off;
    auto [problem, truth] = generate(spec);
    const Eigen::VectorXd resid = problem.response - problem.design * truth.beta_star;
    const double var = resid.squaredNorm() / static_cast<double>(spec.n);
    CHECK(var > 0.9 * spec.sigma * spec.sigma);
    CHECK(var < 1.1 * spec.sigma * spec.sigma);
  }
}

TEST_CASE("logistic generation produces 0/1 labels with matching frequencies") {
  SyntheticSpec spec = base_spec();
  spec.loss = LossKind::Logistic;
  spec.n = 5000;
  spec.signal_min = spec.signal_max = 0.0;  // p(y=1) = 1/2 everywhere
  spec.s = 1;
  auto [problem, truth] = generate(spec);
  double ones = 0.0;
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    CHECK((problem.response[i] == 0.0 || problem.response[i] == 1.0));
    ones += problem.response[i];
  }
  CHECK(ones / static_cast<double>(spec.n) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("spec validation") {
  SyntheticSpec spec = base_spec();
  spec.s = spec.p + 1;
  CHECK_THROWS_AS(generate(spec), ParameterError);
  spec = base_spec();
  spec.design_correlation = 1.0;
  CHECK_THROWS_AS(generate(spec), ParameterError);
  spec = base_spec();
  spec.signal_min = 2.0;
  spec.signal_max = 1.0;
  CHECK_THROWS_AS(generate(spec), ParameterError);
}

TEST_CASE("problem CSV round-trip is exact") {
  const SyntheticSpec spec = base_spec();
  auto [problem, truth] = generate(spec);
  TempFile tmp("roundtrip.csv");
  write_problem_csv(tmp.path, problem);
  const Problem back = read_problem_csv(tmp.path);
  CHECK(back.design == problem.design);
  CHECK(back.response == problem.response);

  write_problem_csv(tmp.path, back);
  const Problem again = read_problem_csv(tmp.path);
  CHECK(again.design == back.design);
}

TEST_CASE("truth CSV round-trip") {
  const SyntheticSpec spec = base_spec();
  auto [problem, truth] = generate(spec);
  TempFile tmp("truth.csv");
  write_truth_csv(tmp.path, truth);
  const SyntheticTruth back = read_truth_csv(tmp.path);
  CHECK(back.beta_star == truth.beta_star);
  CHECK(back.support == truth.support);
  CHECK(back.sigma == truth.sigma);
  CHECK(back.spec.seed == truth.spec.seed);
}

TEST_CASE("malformed CSV inputs") {
  TempFile tmp("bad.csv");
  {
    std::ofstream out(tmp.path);
  }
  CHECK_THROWS_AS(read_problem_csv(tmp.path), ParseError);

  {
    std::ofstream out(tmp.path);
    out << "y,x1,x2\n";
  }
  CHECK_THROWS_AS(read_problem_csv(tmp.path), ShapeError);  // header only, n = 0

  {
    std::ofstream out(tmp.path);
    out << "y,x1,x2\n1.0,2.0\n";
  }
  CHECK_THROWS_AS(read_problem_csv(tmp.path), ShapeError);  // inconsistent column count

  {
    std::ofstream out(tmp.path);
    out << "y,x1,x2\n1.0,abc,3.0\n";
  }
  try {
    read_problem_csv(tmp.path);
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("serialized output is byte-identical across repeated generation") {
  const SyntheticSpec spec = base_spec();
  TempFile a("det_a.csv"), b("det_b.csv");
  {
    auto [problem, truth] = generate(spec);
    write_problem_csv(a.path, problem);
  }
  {
    auto [problem, truth] = generate(spec);
    write_problem_csv(b.path, problem);
  }
  CHECK(slurp(a.path) == slurp(b.path));
}
