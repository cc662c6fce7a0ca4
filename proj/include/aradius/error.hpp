#pragma once

#include <stdexcept>
#include <string>

namespace aradius {

enum class ErrorKind {
  NotHermitian,
  NonFinite,
  NotPSD,
  DimensionMismatch,
  NotABounded,
  ZeroWeight,
  InvalidParams,
  UnsupportedEnsemble,
  UnknownCheck,
  ParseError,
  IOError,
};

const char* to_string(ErrorKind kind);

/// Exception carrying a machine-readable kind; the CLI maps kinds to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotABounded: return "NotABounded";
    case ErrorKind::ZeroWeight: return "ZeroWeight";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::UnsupportedEnsemble: return "UnsupportedEnsemble";
    case ErrorKind::UnknownCheck: return "UnknownCheck";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IOError: return "IOError";
  }
  return "Unknown";
}

}  // namespace aradius
