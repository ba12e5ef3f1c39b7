#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aoii {

enum class ErrorKind {
  Dimension,
  Domain,
  Singular,
  RowSum,
  NegativeRate,
  Reducible,
  TooFewStates,
  InvalidArgument,
  Infeasible,
  GridCap,
  Config,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (and the CLI
/// exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by solves whose matrix is singular to working precision.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, double condition)
      : Error(ErrorKind::Singular, what), condition_(condition) {}

  /// Estimated 1-norm condition number (may be +inf).
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

}  // namespace aoii
