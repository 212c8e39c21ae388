#pragma once

#include <stdexcept>
#include <string>

namespace cvasym {

// Bad numeric parameters (negative ratio, u > n_t, k out of range, ...).
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Argument outside the domain of a function, e.g. x outside [0,1].
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Invalid (n, n_t, V) split scheme; the message names the violated inequality.
struct SchemeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed data: NaN criteria, points outside [0,1], empty samples.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A built object failed one of its own invariants.
struct ConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cvasym
