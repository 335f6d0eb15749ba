#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "dcreg/errors.hpp"
#include "dcreg/penalties.hpp"
#include "penalty_suite.hpp"
#include "test_util.hpp"

using namespace dcreg;

namespace {
const PenaltyFamily kFamilies[] = {PenaltyFamily::L1,           PenaltyFamily::Scad,
                                   PenaltyFamily::Mcp,          PenaltyFamily::CappedL1,
                                   PenaltyFamily::TransformedL1, PenaltyFamily::Logarithmic};
}

TEST_CASE("penalty values at pinned points") {
  // capped-l1: p = lambda * min(|t|, gamma*lambda/2)
  CHECK(penalty_value(PenaltySpec::capped_l1(1.0, 3.0), 5.0) == doctest::Approx(1.5).epsilon(1e-12));
  // value frozen from the quadrature oracle below
  CHECK(penalty_value(PenaltySpec::mcp(1.0, 2.0), 5.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (auto family : kFamilies) {
    Rng rng(7);
    const PenaltySpec spec = testutil::sample_spec(family, rng);
    CHECK(penalty_value(spec, 0.0) == 0.0);
  }
}

TEST_CASE("penalty matches quadrature of the derivative profile") {
  Rng rng(11);
  for (auto family : kFamilies) {
    for (int rep = 0; rep < 20; ++rep) {
      const PenaltySpec spec = testutil::sample_spec(family, rng);
      const double t = rng.uniform(-10.0, 10.0);
      const double expected = testutil::penalty_by_quadrature(spec, t);
      CHECK(penalty_value(spec, t) ==
            doctest::Approx(expected).epsilon(1e-7).scale(std::max(1.0, expected)));
    }
  }
  CHECK(testutil::penalty_by_quadrature(PenaltySpec::mcp(1.0, 2.0), 5.0) ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("h derivative pinned values") {
  CHECK(h_derivative(PenaltySpec::mcp(1.0, 2.0), 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(h_derivative(PenaltySpec::scad(1.0, 3.7), 2.0) ==
        doctest::Approx(1.0 / 2.7).epsilon(1e-12));
  for (auto family : kFamilies) {
    Rng rng(13);
    const PenaltySpec spec = testutil::sample_spec(family, rng);
    CHECK(h_derivative(spec, 0.0) == 0.0);
    CHECK(h_value(spec, 0.0) == 0.0);
  }
}

TEST_CASE("dc_profile assumption sets and constants") {
  const DcProfile scad = dc_profile(PenaltySpec::scad(1.0, 3.7));
  CHECK(scad.assumptions.a3);
  CHECK(scad.assumptions.a4);
  CHECK(scad.assumptions.a5);
  CHECK(scad.assumptions.a6);
  CHECK(scad.assumptions.a7);
  CHECK(scad.zeta.has_value());
  CHECK(*scad.zeta == doctest::Approx(3.7));

  const DcProfile capped = dc_profile(PenaltySpec::capped_l1(1.0, 3.0));
  CHECK_FALSE(capped.assumptions.a5);
  CHECK(capped.assumptions.a7);
  CHECK(std::isinf(capped.eta_minus));
  CHECK(*capped.zeta == doctest::Approx(1.5));

  const DcProfile capped_smooth = dc_profile(PenaltySpec::capped_l1(1.0, 3.0, 3e-3));
  CHECK(capped_smooth.assumptions.a5);
  CHECK(capped_smooth.eta_minus == doctest::Approx(1.0 / 3e-3));

  const DcProfile mcp = dc_profile(PenaltySpec::mcp(1.0, 2.0));
  CHECK(mcp.eta_minus == doctest::Approx(0.5));
  CHECK(*mcp.zeta == doctest::Approx(2.0));

  const DcProfile l1 = dc_profile(PenaltySpec::l1(1.0));
  CHECK_FALSE(l1.zeta.has_value());
  CHECK_FALSE(l1.assumptions.a7);
  CHECK(l1.eta_minus == 0.0);

  const DcProfile tl1 = dc_profile(PenaltySpec::transformed_l1(2.0, 4.0));
  CHECK(tl1.eta_minus == doctest::Approx(1.0));
  CHECK_FALSE(tl1.zeta.has_value());

  const DcProfile lg = dc_profile(PenaltySpec::logarithmic(3.0, 2.0));
  CHECK(lg.eta_minus == doctest::Approx(1.5));
  CHECK_FALSE(lg.zeta.has_value());

  for (auto family : kFamilies) {
    Rng rng(17);
    const DcProfile profile = dc_profile(testutil::sample_spec(family, rng));
    CHECK(profile.eta_plus == 0.0);
    CHECK(profile.eta_plus <= profile.eta_minus);
    CHECK(profile.zeta.has_value() == profile.assumptions.a7);
  }
}

TEST_CASE("eta_minus matches the observed max slope of h'") {
  // Fine-grid finite differences as an independent route to the curvature bound.
  Rng rng(23);
  for (auto family : {PenaltyFamily::Scad, PenaltyFamily::Mcp, PenaltyFamily::TransformedL1,
                      PenaltyFamily::Logarithmic}) {
    const PenaltySpec spec = testutil::sample_spec(family, rng);
    const DcProfile profile = dc_profile(spec);
    const double span = 4.0 * std::max(1.0, spec.lambda * std::max(spec.shape, 1.0));
    double max_slope = 0.0;
    const int grid = 20000;
    double prev = h_derivative(spec, -span);
    for (int i = 1; i <= grid; ++i) {
      const double t = -span + 2.0 * span * i / grid;
      const double cur = h_derivative(spec, t);
      max_slope = std::max(max_slope, (cur - prev) / (2.0 * span / grid));
      prev = cur;
    }
    CHECK(max_slope <= profile.eta_minus + 1e-9);
    CHECK(max_slope == doctest::Approx(profile.eta_minus).epsilon(0.05));
  }
  CHECK(dc_profile(PenaltySpec::mcp(1.0, 2.0)).eta_minus == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("scale identity for scale-free families") {
  // post: returns (p_{c*lambda}(c*t), c^2 p_lambda(t)), equal for these families
  const auto l1 = scale_check(PenaltySpec::l1(1.0), 2.0, 3.0);
  CHECK(l1.first == doctest::Approx(l1.second).epsilon(1e-12));
  CHECK(l1.first == doctest::Approx(18.0).epsilon(1e-12));

  const auto mcp = scale_check(PenaltySpec::mcp(1.0, 2.0), 1.0, 2.0);
  CHECK(mcp.first == doctest::Approx(mcp.second).epsilon(1e-12));

  const auto scad = scale_check(PenaltySpec::scad(0.5, 3.7), 0.3, 10.0);
  CHECK(scad.first == doctest::Approx(scad.second).epsilon(1e-12));

  Rng rng(29);
  for (auto family : {PenaltyFamily::L1, PenaltyFamily::Scad, PenaltyFamily::Mcp,
                      PenaltyFamily::CappedL1}) {
    for (int rep = 0; rep < 50; ++rep) {
      const PenaltySpec spec = testutil::sample_spec(family, rng);
      const auto pair = scale_check(spec, rng.uniform(-10.0, 10.0), rng.uniform(0.1, 10.0));
      CHECK(pair.first == doctest::Approx(pair.second).epsilon(1e-10));
    }
  }

  CHECK_THROWS_AS(scale_check(PenaltySpec::transformed_l1(1.0, 1.0), 1.0, 2.0),
                  UnsupportedFamilyError);
  CHECK_THROWS_AS(scale_check(PenaltySpec::logarithmic(1.0, 1.0), 1.0, 2.0),
                  UnsupportedFamilyError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(penalty_value(PenaltySpec::scad(1.0, 1.0), 1.0), ParameterError);
  CHECK_THROWS_AS(penalty_value(PenaltySpec::scad(1.0, 0.9), 1.0), ParameterError);
  CHECK_THROWS_AS(penalty_value(PenaltySpec::mcp(1.0, 0.0), 1.0), ParameterError);
  CHECK_THROWS_AS(penalty_value(PenaltySpec::mcp(-1.0, 2.0), 1.0), ParameterError);
  CHECK_THROWS_AS(penalty_value(PenaltySpec::capped_l1(1.0, -1.0), 1.0), ParameterError);
  CHECK_THROWS_AS(penalty_value(PenaltySpec::transformed_l1(1.0, 0.0), 1.0), ParameterError);
  CHECK_THROWS_AS(penalty_value(PenaltySpec::logarithmic(1.0, 0.0), 1.0), ParameterError);
  // smoothing window must stay inside (0, gamma*lambda)
  CHECK_THROWS_AS(penalty_value(PenaltySpec::capped_l1(1.0, 2.0, 2.5), 1.0), ParameterError);
  CHECK_THROWS_AS(penalty_value(PenaltySpec{PenaltyFamily::Mcp, 1.0, 2.0, 0.1}, 1.0),
                  ParameterError);
  // lambda = 0 degenerates to the zero penalty
  CHECK(penalty_value(PenaltySpec::scad(0.0, 3.7), 2.0) == 0.0);
  CHECK(h_derivative(PenaltySpec::mcp(0.0, 2.0), 2.0) == 0.0);
}

TEST_CASE("randomized invariant suite per family") {
  for (auto family : kFamilies) {
    const auto report = testutil::run_penalty_invariant_suite(family, 2000, 1234);
    CAPTURE(static_cast<int>(family));
    CAPTURE(report.first_failure);
    CHECK(report.violations == 0);
  }
}

TEST_CASE("smoothed capped-l1 restores h' continuity across the kink") {
  const double gamma = 3.0, lambda = 2.0;
  const double mu = PenaltySpec::default_capped_smoothing(gamma);
  const PenaltySpec spec = PenaltySpec::capped_l1(lambda, gamma, mu);
  const double kink = 0.5 * gamma * lambda;
  double prev = h_derivative(spec, kink - mu);
  for (double t = kink - mu; t <= kink + mu; t += mu / 50.0) {
    const double cur = h_derivative(spec, t);
    CHECK(cur - prev <= lambda / mu * (mu / 50.0) * 1.0001 + 1e-12);
    CHECK(cur >= prev - 1e-12);
    prev = cur;
  }
  CHECK(h_derivative(spec, kink + mu) == lambda);
  // unsmoothed: subgradient midpoint exactly at the kink
  const PenaltySpec hard = PenaltySpec::capped_l1(lambda, gamma);
  CHECK(h_derivative(hard, kink) == doctest::Approx(0.5 * lambda));
}
