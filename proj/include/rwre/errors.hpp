#pragma once

#include <stdexcept>
#include <string>

namespace rwre {

// Caller violated a precondition (bad argument, wrong call order).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data (environment, plan, file) is not acceptable.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configured size or work bound was exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative method failed to converge or hit a singular system.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The quantity is undefined for this input (e.g. division by a zero escape probability).
class DegenerateInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace rwre
