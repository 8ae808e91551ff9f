#pragma once

#include <stdexcept>
#include <string>

namespace cptquit {

/// Raised when a caller breaks an operation's precondition.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a distribution cannot be embedded by the horizon, or when an
/// input file names a law that violates one of the distribution invariants.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cptquit
