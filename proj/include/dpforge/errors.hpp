#pragma once

#include <stdexcept>
#include <string>

namespace dpforge {

// Raised when two planes that must share a geometry do not.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thin-lens or scene geometry that has no physical meaning (s <= f, d <= 0, ...).
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed .dppsf / PNG / manifest input.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration values, or a kernel that does not fit its patch.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Layout sampling or sample rendering could not complete.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dpforge
