#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cmrac {

enum class ErrorKind {
  NotHurwitz,
  SingularSystem,
  NotSymmetric,
  NotPositiveDefinite,
  MatchingViolated,
  InfeasibleConstraint,
  DimensionMismatch,
  BarrierViolated,
  NonFiniteState,
  StabilityConditionViolated,
  IdentityViolated,
  InvalidScenario,
  ParseError,
  MissingColumn,
  IoError,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` carries the category.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cmrac
