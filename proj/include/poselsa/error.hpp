#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace poselsa {

/// Failure categories. The CLI maps each one to its own exit status.
enum class ErrorKind {
  Io,
  Parse,
  Validation,
  EmptyModel,
  Calibration,
  Numeric,
  UndefinedCorrelation,
  ConfigMismatch,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return "io";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::EmptyModel: return "empty-model";
    case ErrorKind::Calibration: return "calibration";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::UndefinedCorrelation: return "undefined-correlation";
    case ErrorKind::ConfigMismatch: return "config-mismatch";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace poselsa
