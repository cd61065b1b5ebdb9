#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cifs {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failures: the pipeline maps these to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A theorem hypothesis does not hold for the scenario (exit code 2).
class HypothesisFailure : public Error {
 public:
  using Error::Error;
};

class InvalidMap : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class UnresolvedTangency : public NumericalError {
 public:
  explicit UnresolvedTangency(double where)
      : NumericalError("unresolved tangency of f^q - id near x = " + std::to_string(where)),
        location(where) {}
  double location;
};

class EnvelopeViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class AmbiguousKind : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class CommonFixedPoint : public HypothesisFailure {
 public:
  CommonFixedPoint(double p0, double p1)
      : HypothesisFailure("generators share a fixed point near " + std::to_string(p0)),
        f0_point(p0), f1_point(p1) {}
  double f0_point;
  double f1_point;
};

class NoCoveringBasins : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OrderViolation : public NumericalError {
 public:
  OrderViolation(int k, std::string inequality)
      : NumericalError("cycle order violated at k = " + std::to_string(k) + ": " + inequality),
        index(k), failed(std::move(inequality)) {}
  int index;
  std::string failed;
};

class StageOrderViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OverlapEmpty : public HypothesisFailure {
 public:
  using HypothesisFailure::HypothesisFailure;
};

class BoundNotExceeded : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

class ScenarioInvalid : public Error {
 public:
  explicit ScenarioInvalid(std::vector<std::string> problems)
      : Error(join(problems)), fields(std::move(problems)) {}
  std::vector<std::string> fields;  // "path: message"

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid scenario";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "; " : ": ") + v[i];
    return out;
  }
};

class MissingSection : public Error {
 public:
  using Error::Error;
};

}  // namespace cifs
