#pragma once

#include <stdexcept>
#include <string>

namespace suslab {

// Failure taxonomy shared by the library and the CLI. Each class maps to one
// process exit code (see cli::exit_code_for).

/// Argument outside the mathematical domain of an operation (negative rate,
/// r >= -1 for the stopping experiment, nonpositive density, ...).
class DomainError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A documented precondition does not hold for the given profile, e.g. a
/// nonzero chi passed to the conservativity machinery.
class PreconditionError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// A configuration window does not cover the support the computation needs.
class CoverageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Observed behaviour contradicts a structural property the computation
/// relies on (non-monotone verdicts along an intensity scan).
class AnomalyError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unknown configuration input.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace suslab
