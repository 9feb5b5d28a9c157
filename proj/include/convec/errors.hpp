#pragma once

#include <stdexcept>
#include <string>

namespace convec {

/// Input violates an operation's precondition (bad index, negative radius, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Data that is well formed but mutually inconsistent (e.g. a Neumann problem
/// whose right-hand side has nonzero mean).
class InconsistentData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Discretization too coarse for the requested truncation or problem.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time integration produced non-finite values.
class BlowUp : public std::runtime_error {
 public:
  BlowUp(const std::string& what, double t) : std::runtime_error(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Fixed-point or eigen iteration failed to converge.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The two routes to the stability maximum disagree.
class NormalizationMismatch : public std::runtime_error {
 public:
  NormalizationMismatch(const std::string& what, double direct, double eigen)
      : std::runtime_error(what), direct_(direct), eigen_(eigen) {}
  double direct() const { return direct_; }
  double eigen() const { return eigen_; }

 private:
  double direct_;
  double eigen_;
};

/// A consistency check failed where the mathematics guarantees success.
class CheckFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace convec
