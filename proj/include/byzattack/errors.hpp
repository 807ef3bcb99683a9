#pragma once

#include <stdexcept>
#include <string>

namespace byzattack {

/// A value violates a domain-type invariant (non-positive variance, weight
/// outside [0,1], ...). The message names the offending field.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An outer point violates the energy / attacking-power feasibility set.
class InfeasiblePoint : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical routine cannot meet its documented accuracy (e.g. a quadrature
/// grid that truncates more than the allowed density mass).
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace byzattack
