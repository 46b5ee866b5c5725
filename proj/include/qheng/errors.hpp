#pragma once

#include <stdexcept>
#include <string>

namespace qheng {

/// A parameter or state outside the operation's domain (non-positive
/// temperature, inverted population bounds, degenerate cycle, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The operation has no meaning for the given input kind, e.g. a closed form
/// requested for a custom spectrum.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A caller broke a structural precondition (e.g. isothermal stroke on a
/// snapshot that is not attached to a bath).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An iterative numerical method did not reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qheng
