#pragma once

#include <stdexcept>
#include <string>

namespace dropsim {

// Exit codes of the CLI map one-to-one onto these.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The physics left the supported regime (no period-doubled bounce,
/// over-barrier packet, near-field samples ...).
class RegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integration or fitting failed numerically.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Guidance velocity requested where |psi| is below the node threshold.
class NodeError : public NumericError {
 public:
  using NumericError::NumericError;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRegime = 3;
inline constexpr int kExitNumeric = 4;

}  // namespace dropsim
