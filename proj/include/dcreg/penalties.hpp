#pragma once

#include <optional>
#include <utility>

namespace dcreg {

// Separable sparsity penalties written as p_lambda(t) = lambda*|t| - h_lambda(t)
// with h convex, symmetric, h(0) = h'(0) = 0 and |h'| <= lambda. The scale-free
// families (L1, SCAD, MCP, CappedL1) follow p_lambda(t) = lambda^2 * p1(t/lambda);
// TransformedL1 and Logarithmic scale linearly, p_lambda(t) = lambda * p1(t).
enum class PenaltyFamily { L1, Scad, Mcp, CappedL1, TransformedL1, Logarithmic };

struct PenaltySpec {
  PenaltyFamily family = PenaltyFamily::L1;
  double lambda = 1.0;
  // gamma for SCAD/MCP/CappedL1, a for TransformedL1, log offset for Logarithmic.
  double shape = 0.0;
  // CappedL1 only: width of the quadratic smoothing window around the h' jump
  // at |t| = gamma*lambda/2, in t units. 0 disables smoothing.
  double smoothing = 0.0;

  static PenaltySpec l1(double lambda);
  static PenaltySpec scad(double lambda, double gamma = 3.7);
  static PenaltySpec mcp(double lambda, double gamma);
  static PenaltySpec capped_l1(double lambda, double gamma, double smoothing = 0.0);
  static PenaltySpec transformed_l1(double lambda, double a);
  static PenaltySpec logarithmic(double lambda, double offset = 1.0);

  // Default smoothing width for CappedL1 when smoothing is requested.
  static double default_capped_smoothing(double gamma) { return 1e-3 * gamma; }

  // Throws ParameterError on invalid parameters. lambda = 0 is accepted and
  // degenerates every family to the zero penalty (unpenalized limit).
  void validate() const;

  bool scale_free() const;
};

struct AssumptionSet {
  bool a3 = false;  // |h'| <= lambda
  bool a4 = false;  // symmetry
  bool a5 = false;  // h' Lipschitz with constant eta_minus
  bool a6 = false;  // h(0) = h'(0) = 0
  bool a7 = false;  // h'(t) = lambda for |t| >= zeta
};

struct DcProfile {
  double eta_minus = 0.0;  // upper curvature bound of h; +infinity for unsmoothed CappedL1
  double eta_plus = 0.0;   // lower curvature bound; 0 for every shipped family
  std::optional<double> zeta;  // unbiasedness threshold; present exactly when a7 holds
  AssumptionSet assumptions;
};

// p_lambda(t); nonnegative, even, nondecreasing in |t|.
double penalty_value(const PenaltySpec& spec, double t);

// One-sided derivative of p_lambda taken away from zero:
// sign(t) * (lambda - |h'(t)|) for t != 0, and the right derivative lambda at t = 0.
double penalty_derivative(const PenaltySpec& spec, double t);

// Convex component h_lambda and its derivative (odd in t; at the unsmoothed
// CappedL1 kink the midpoint of the one-sided derivatives is returned).
double h_value(const PenaltySpec& spec, double t);
double h_derivative(const PenaltySpec& spec, double t);

DcProfile dc_profile(const PenaltySpec& spec);

// Assumption-2 scale identity for scale-free families: returns the pair
// (p_{c*lambda}(c*t), c^2 * p_lambda(t)), equal up to rounding. For a smoothed
// CappedL1 the smoothing window scales with lambda. Throws
// UnsupportedFamilyError for TransformedL1/Logarithmic.
std::pair<double, double> scale_check(const PenaltySpec& spec, double t, double c);

}  // namespace dcreg
