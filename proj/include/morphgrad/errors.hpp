#pragma once

#include <stdexcept>
#include <string>

namespace morphgrad {

// Caller broke a documented precondition (dimension mismatch, bad shape...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A fitness, gradient or distribution went non-finite.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractError(message);
}

}  // namespace morphgrad
