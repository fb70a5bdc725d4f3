#pragma once

#include <stdexcept>
#include <string>

namespace bnpfc {

// Malformed or inconsistent input data (panel, sidecar, alignment).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A factorization or sampler step produced an unusable numerical state.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid run configuration; maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bnpfc
