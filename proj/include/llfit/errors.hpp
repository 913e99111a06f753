#pragma once

#include <stdexcept>

namespace llfit {

/// Argument outside the support or domain of an operation (x <= x_L, u >= 1, ...).
class DomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

/// Distribution or configuration parameters that violate their invariants.
class InvalidParameter : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// A root bracket could not be established or a solver did not converge.
class ConvergenceError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace llfit
