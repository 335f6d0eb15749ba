#include "dcreg/penalties.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dcreg/errors.hpp"

namespace dcreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Base-scale (lambda = 1) convex component h1 evaluated at u = |t| >= 0.
// For CappedL1, width is the smoothing window in base units (0 = hard kink).
double h1_value(const PenaltySpec& spec, double u, double width) {
  const double g = spec.shape;
  switch (spec.family) {
    case PenaltyFamily::L1:
      return 0.0;
    case PenaltyFamily::Scad:
      if (u <= 1.0) return 0.0;
      if (u < g) return (u - 1.0) * (u - 1.0) / (2.0 * (g - 1.0));
      return u - 0.5 * (g + 1.0);
    case PenaltyFamily::Mcp:
      if (u <= g) return u * u / (2.0 * g);
      return u - 0.5 * g;
    case PenaltyFamily::CappedL1: {
      const double k = 0.5 * g;
      if (width <= 0.0) return u > k ? u - k : 0.0;
      const double lo = k - 0.5 * width;
      if (u <= lo) return 0.0;
      if (u >= k + 0.5 * width) return u - k;
      const double d = u - lo;
      return d * d / (2.0 * width);
    }
    case PenaltyFamily::TransformedL1:
      return u - g * u / (g + u);
    case PenaltyFamily::Logarithmic:
      return u - g * std::log1p(u / g);
  }
  return 0.0;
}

// d h1 / du at u >= 0 (the unsmoothed CappedL1 kink maps to the subgradient
// midpoint 1/2).
double h1_derivative(const PenaltySpec& spec, double u, double width) {
  const double g = spec.shape;
  switch (spec.family) {
    case PenaltyFamily::L1:
      return 0.0;
    case PenaltyFamily::Scad:
      if (u <= 1.0) return 0.0;
      if (u < g) return (u - 1.0) / (g - 1.0);
      return 1.0;
    case PenaltyFamily::Mcp:
      return u < g ? u / g : 1.0;
    case PenaltyFamily::CappedL1: {
      const double k = 0.5 * g;
      if (width <= 0.0) {
        if (u < k) return 0.0;
        if (u > k) return 1.0;
        return 0.5;
      }
      const double lo = k - 0.5 * width;
      if (u <= lo) return 0.0;
      if (u >= k + 0.5 * width) return 1.0;
      return (u - lo) / width;
    }
    case PenaltyFamily::TransformedL1: {
      const double s = g + u;
      return (s * s - g * g) / (s * s);
    }
    case PenaltyFamily::Logarithmic:
      return u / (u + g);
  }
  return 0.0;
}

// Base-scale penalty p1(u) = u - h1(u), written in closed form so that
// nonnegativity and monotonicity survive rounding.
double p1_value(const PenaltySpec& spec, double u, double width) {
  const double g = spec.shape;
  switch (spec.family) {
    case PenaltyFamily::L1:
      return u;
    case PenaltyFamily::Scad:
      if (u <= 1.0) return u;
      if (u < g) return u - (u - 1.0) * (u - 1.0) / (2.0 * (g - 1.0));
      return 0.5 * (g + 1.0);
    case PenaltyFamily::Mcp:
      if (u <= g) return u - u * u / (2.0 * g);
      return 0.5 * g;
    case PenaltyFamily::CappedL1: {
      const double k = 0.5 * g;
      if (width <= 0.0) return u < k ? u : k;
      const double lo = k - 0.5 * width;
      if (u <= lo) return u;
      if (u >= k + 0.5 * width) return k;
      const double d = u - lo;
      return u - d * d / (2.0 * width);
    }
    case PenaltyFamily::TransformedL1:
      return g * u / (g + u);
    case PenaltyFamily::Logarithmic:
      return g * std::log1p(u / g);
  }
  return 0.0;
}

double base_width(const PenaltySpec& spec) {
  if (spec.family != PenaltyFamily::CappedL1 || spec.smoothing <= 0.0) return 0.0;
  return spec.smoothing / spec.lambda;
}

const char* family_name(PenaltyFamily f) {
  switch (f) {
    case PenaltyFamily::L1: return "l1";
    case PenaltyFamily::Scad: return "scad";
    case PenaltyFamily::Mcp: return "mcp";
    case PenaltyFamily::CappedL1: return "capped-l1";
    case PenaltyFamily::TransformedL1: return "transformed-l1";
    case PenaltyFamily::Logarithmic: return "log";
  }
  return "?";
}

}  // namespace

PenaltySpec PenaltySpec::l1(double lambda) { return {PenaltyFamily::L1, lambda, 0.0, 0.0}; }
PenaltySpec PenaltySpec::scad(double lambda, double gamma) {
  return {PenaltyFamily::Scad, lambda, gamma, 0.0};
}
PenaltySpec PenaltySpec::mcp(double lambda, double gamma) {
  return {PenaltyFamily::Mcp, lambda, gamma, 0.0};
}
PenaltySpec PenaltySpec::capped_l1(double lambda, double gamma, double smoothing) {
  return {PenaltyFamily::CappedL1, lambda, gamma, smoothing};
}
PenaltySpec PenaltySpec::transformed_l1(double lambda, double a) {
  return {PenaltyFamily::TransformedL1, lambda, a, 0.0};
}
PenaltySpec PenaltySpec::logarithmic(double lambda, double offset) {
  return {PenaltyFamily::Logarithmic, lambda, offset, 0.0};
}

void PenaltySpec::validate() const {
  if (!std::isfinite(lambda) || lambda < 0.0)
    throw ParameterError("penalty lambda must be finite and >= 0");
  switch (family) {
    case PenaltyFamily::L1:
      break;
    case PenaltyFamily::Scad:
      if (!std::isfinite(shape) || shape <= 1.0)
        throw ParameterError("scad requires shape gamma > 1");
      break;
    case PenaltyFamily::Mcp:
    case PenaltyFamily::CappedL1:
      if (!std::isfinite(shape) || shape <= 0.0)
        throw ParameterError(std::string(family_name(family)) + " requires shape gamma > 0");
      break;
    case PenaltyFamily::TransformedL1:
      if (!std::isfinite(shape) || shape <= 0.0)
        throw ParameterError("transformed-l1 requires shape a > 0");
      break;
    case PenaltyFamily::Logarithmic:
      if (!std::isfinite(shape) || shape <= 0.0)
        throw ParameterError("log penalty requires offset > 0");
      break;
  }
  if (smoothing != 0.0) {
    if (family != PenaltyFamily::CappedL1)
      throw ParameterError("smoothing is only defined for capped-l1");
    if (!std::isfinite(smoothing) || smoothing < 0.0)
      throw ParameterError("smoothing width must be finite and >= 0");
    if (smoothing >= shape * lambda)
      throw ParameterError("smoothing width must be < gamma*lambda");
  }
}

bool PenaltySpec::scale_free() const {
  switch (family) {
    case PenaltyFamily::L1:
    case PenaltyFamily::Scad:
    case PenaltyFamily::Mcp:
    case PenaltyFamily::CappedL1:
      return true;
    default:
      return false;
  }
}

double penalty_value(const PenaltySpec& spec, double t) {
  spec.validate();
  if (spec.lambda == 0.0) return 0.0;
  const double u = std::abs(t);
  if (spec.scale_free())
    return spec.lambda * spec.lambda * p1_value(spec, u / spec.lambda, base_width(spec));
  return spec.lambda * p1_value(spec, u, 0.0);
}

double penalty_derivative(const PenaltySpec& spec, double t) {
  spec.validate();
  if (t == 0.0) return spec.lambda;
  return spec.lambda * (t > 0 ? 1.0 : -1.0) - h_derivative(spec, t);
}

double h_value(const PenaltySpec& spec, double t) {
  spec.validate();
  if (spec.lambda == 0.0) return 0.0;
  const double u = std::abs(t);
  if (spec.scale_free())
    return spec.lambda * spec.lambda * h1_value(spec, u / spec.lambda, base_width(spec));
  return spec.lambda * h1_value(spec, u, 0.0);
}

double h_derivative(const PenaltySpec& spec, double t) {
  spec.validate();
  if (spec.lambda == 0.0 || t == 0.0) return 0.0;
  const double sgn = t > 0 ? 1.0 : -1.0;
  const double u = std::abs(t);
  if (spec.scale_free())
    return sgn * spec.lambda * h1_derivative(spec, u / spec.lambda, base_width(spec));
  return sgn * spec.lambda * h1_derivative(spec, u, 0.0);
}

DcProfile dc_profile(const PenaltySpec& spec) {
  spec.validate();
  DcProfile out;
  out.eta_plus = 0.0;
  out.assumptions = {true, true, true, true, false};
  switch (spec.family) {
    case PenaltyFamily::L1:
      out.eta_minus = 0.0;
      break;
    case PenaltyFamily::Scad:
      out.eta_minus = 1.0 / (spec.shape - 1.0);
      out.assumptions.a7 = true;
      out.zeta = spec.shape * spec.lambda;
      break;
    case PenaltyFamily::Mcp:
      out.eta_minus = 1.0 / spec.shape;
      out.assumptions.a7 = true;
      out.zeta = spec.shape * spec.lambda;
      break;
    case PenaltyFamily::CappedL1:
      if (spec.smoothing > 0.0) {
        out.eta_minus = spec.lambda / spec.smoothing;
      } else {
        out.eta_minus = kInf;
        out.assumptions.a5 = false;
      }
      out.assumptions.a7 = true;
      out.zeta = 0.5 * (spec.shape * spec.lambda + spec.smoothing);
      break;
    case PenaltyFamily::TransformedL1:
      out.eta_minus = 2.0 * spec.lambda / spec.shape;
      break;
    case PenaltyFamily::Logarithmic:
      out.eta_minus = spec.lambda / spec.shape;
      break;
  }
  return out;
}

std::pair<double, double> scale_check(const PenaltySpec& spec, double t, double c) {
  spec.validate();
  if (!spec.scale_free())
    throw UnsupportedFamilyError(std::string(family_name(spec.family)) +
                                 " does not satisfy the scale-free condition");
  if (!std::isfinite(c) || c <= 0.0) throw ParameterError("scale factor c must be positive");
  PenaltySpec scaled = spec;
  scaled.lambda *= c;
  scaled.smoothing *= c;
  return {penalty_value(scaled, c * t), c * c * penalty_value(spec, t)};
}

}  // namespace dcreg
