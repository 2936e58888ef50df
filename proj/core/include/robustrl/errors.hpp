#pragma once

#include <stdexcept>

namespace robustrl {

/// Thrown when a caller breaks a documented precondition (bad shapes,
/// negative radii, empty candidate sets, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when external data or a computed result fails validation: a
/// malformed config or model file, or an adversarial kernel that does not
/// reproduce the robust values it was extracted from.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace robustrl
