#pragma once

#include <stdexcept>
#include <string>

namespace doconto {

// Bad argument or configuration value. Maps to CLI exit code 1.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unreadable input, malformed artifact, or schema violation. Exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite value during training or optimization. Exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace doconto
