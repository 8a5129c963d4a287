#pragma once

#include <stdexcept>
#include <string>

namespace cape {

// Input outside the model's parameter space (violated assumption, bad range).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The data or parameters make a computation meaningless: an observed cell with
// zero probability everywhere, a degenerate moment condition, an interval
// emptied by clamping, or an asymptotic interval requested at a boundary.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cape
