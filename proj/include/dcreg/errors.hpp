#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dcreg {

// Invalid penalty / generator / solver parameters.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Mismatched matrix/vector dimensions.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation not defined for the given penalty family.
class UnsupportedFamilyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Response outside the loss family's domain (e.g. non-binary logistic labels).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Restricted design X_S is numerically rank deficient.
class SingularDesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bound regime does not apply (e.g. RSC margin gamma - eta_minus <= 0).
class RegimeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input file; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, long line = 0)
      : std::runtime_error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

// Non-finite objective during optimization; carries the trace so far.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& msg, std::vector<double> trace)
      : std::runtime_error(msg), trace_(std::move(trace)) {}
  const std::vector<double>& objective_trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

}  // namespace dcreg
