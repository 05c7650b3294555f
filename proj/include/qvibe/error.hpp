#pragma once

#include <stdexcept>
#include <string>

namespace qvibe {

// Failure classes surfaced through the C API and the CLI exit status.
enum class ErrorKind { config, io, analysis };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Invalid parameters, scenario files or preconditions on user input.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

/// Unreadable/unwritable paths and malformed stream files.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

/// Numerical failures inside the estimation pipeline.
class AnalysisError : public Error {
 public:
  explicit AnalysisError(const std::string& what) : Error(ErrorKind::analysis, what) {}
};

}  // namespace qvibe
