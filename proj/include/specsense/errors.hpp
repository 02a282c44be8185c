#pragma once

#include <stdexcept>

namespace specsense {

// Thrown by exhaustive-enumeration operations when the subset count would
// exceed the desk-scale cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when every subset weight of a sampling distribution is zero.
class DegenerateDistributionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when a solve requires full column rank and the matrix has none.
class RankDeficiencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown on malformed experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace specsense
