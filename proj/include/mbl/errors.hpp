#pragma once

#include <stdexcept>
#include <string>

namespace mbl {

// Precondition violations: bad sizes, mismatched sectors, malformed inputs.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// Numerical failure inside a library routine (e.g. eigensolver did not converge).
class ComputationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Scaling analysis could not produce a result from the given data.
class AnalysisError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Invalid or unreadable configuration.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace mbl
