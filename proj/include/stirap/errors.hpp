#ifndef STIRAP_ERRORS_HPP
#define STIRAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace stirap {

// Invalid user-supplied configuration or parameters (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation, e.g. the dark state
// with both fields off or the figure of merit at an exact sweet spot.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Solver failures: step-size underflow, non-finite state, loss of
// positivity, non-convergent eigensolver (CLI exit code 3).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Charge-basis truncation too small for the requested spectrum.
class TruncationError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace stirap

#endif  // STIRAP_ERRORS_HPP
