#pragma once

#include <stdexcept>

namespace gridwave {

// Input or configuration violates a documented contract. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical procedure failed: no equilibrium, diverged integration, non-finite state.
// The CLI maps this to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gridwave
