#pragma once

#include <stdexcept>
#include <string>

namespace ns1d {

/// Argument outside the mathematical domain of an operation (nonpositive
/// density, sample point outside [0,1], oversized perturbation, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Boundary data that does not describe a noncharacteristic inflow/outflow
/// problem (mixed velocity signs or a zero velocity).
class UnsupportedBoundary : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative solve ran out of budget.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double lo, double hi)
      : std::runtime_error(what), bracket_lo(lo), bracket_hi(hi) {}
  double bracket_lo;
  double bracket_hi;
};

/// NaN/overflow or loss of positivity during an integration.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, long step)
      : std::runtime_error(what), step(step) {}
  long step;
};

}  // namespace ns1d
