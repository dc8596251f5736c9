#pragma once

#include <stdexcept>
#include <string>

namespace ushift {

/// Raised when a numeric argument is outside its admissible range.
class InvalidParameter : public std::invalid_argument {
 public:
  explicit InvalidParameter(const std::string& what)
      : std::invalid_argument(what) {}
};

/// Raised when a grid index falls outside the simulated window.
class OutOfWindow : public std::out_of_range {
 public:
  explicit OutOfWindow(const std::string& what) : std::out_of_range(what) {}
};

/// Raised when a target measure does not fit the requested construction
/// (for instance an atom at zero handed to the plain balancing shift).
class ConstructionMismatch : public std::invalid_argument {
 public:
  explicit ConstructionMismatch(const std::string& what)
      : std::invalid_argument(what) {}
};

}  // namespace ushift
