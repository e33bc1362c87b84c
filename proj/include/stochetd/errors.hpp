#pragma once

#include <stdexcept>
#include <string>

namespace stochetd {

// Numeric codes shared with the C API (see stochetd.h).
enum class ErrorCode : int {
  ok = 0,
  runtime = 1,
  config = 2,
  blowup = 3,
  io = 4,
  dimension = 5,
  nonfinite = 6,
  invalid_argument = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct NonFiniteError : Error {
  explicit NonFiniteError(const std::string& what)
      : Error(ErrorCode::nonfinite, what) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& what)
      : Error(ErrorCode::dimension, what) {}
};

struct InvalidConfig : Error {
  explicit InvalidConfig(const std::string& what)
      : Error(ErrorCode::config, what) {}
};

struct InvalidFactor : Error {
  explicit InvalidFactor(const std::string& what)
      : Error(ErrorCode::config, what) {}
};

struct IndexOutOfRange : Error {
  explicit IndexOutOfRange(const std::string& what)
      : Error(ErrorCode::invalid_argument, what) {}
};

struct MissingLinearPart : Error {
  explicit MissingLinearPart(const std::string& what)
      : Error(ErrorCode::invalid_argument, what) {}
};

struct CoefficientMismatch : Error {
  explicit CoefficientMismatch(const std::string& what)
      : Error(ErrorCode::invalid_argument, what) {}
};

struct InsufficientData : Error {
  explicit InsufficientData(const std::string& what)
      : Error(ErrorCode::invalid_argument, what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what)
      : Error(ErrorCode::config, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

}  // namespace stochetd
