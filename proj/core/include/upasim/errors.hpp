#pragma once

#include <stdexcept>
#include <string>

namespace upasim {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad grid, window, or config file content. `line` is 0 when not tied to a file.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A sampled initial profile produced a non-finite value.
class InitializationError : public Error {
 public:
  using Error::Error;
};

/// Fields or face arrays defined on different grids.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A coefficient left its declared range while the solver was running.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Base for hypothesis failures detected by `validate`.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::string quantity, double margin)
      : Error(what), quantity_(std::move(quantity)), margin_(margin) {}
  const std::string& quantity() const noexcept { return quantity_; }
  double margin() const noexcept { return margin_; }

 private:
  std::string quantity_;
  double margin_;
};

/// Ellipticity bound not positive or inverted.
class EllipticityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Initial datum below zero.
class NegativeInitialDataError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// alpha_11^2 >= 4 alpha_21 mu_C / K_C.
class ReactionBalanceError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// (chi_11 + chi_21)^2 >= 4 d_C^(0) d_N^(0) in the strict regime.
class ChiConditionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Diagnostics called with too little or malformed data.
class DiagnosticError : public Error {
 public:
  using Error::Error;
};

/// Snapshot file could not be decoded.
class FormatError : public Error {
 public:
  using Error::Error;
};

class UnsupportedVersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// An oracle could not produce a trustworthy reference value.
class OracleFailure : public Error {
 public:
  using Error::Error;
};

/// A verification run produced a table that breaks its own preconditions.
class HarnessFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace upasim
