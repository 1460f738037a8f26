#pragma once

#include <stdexcept>
#include <string>

namespace chemomass {

// Input that violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// mu does not match the mean of w in the elliptic solve.
class CompatibilityError : public std::invalid_argument {
 public:
  explicit CompatibilityError(const std::string& what) : std::invalid_argument(what) {}
};

// Mass regime mismatch: a supercritical recipe called with m <= 8 pi delta, or
// a subcritical bound called with m >= 8 pi delta.
class RegimeError : public std::invalid_argument {
 public:
  explicit RegimeError(const std::string& what) : std::invalid_argument(what) {}
};

// NaN, negative undershoot or a singular linear system during time stepping.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Constructed initial data fails its own verification pass.
class ConstructionError : public std::runtime_error {
 public:
  explicit ConstructionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace chemomass
