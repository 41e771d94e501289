#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace intdim {

/// Error categories. Each maps onto one process exit code of the CLI.
enum class ErrorKind {
  configuration,   // bad parameters or manifest contents
  validation,      // malformed or non-finite input data
  degenerate_data, // data that cannot support an estimate (duplicates, too few points)
  io,              // missing or unreadable files
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::configuration, what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

/// Malformed file contents. `offset` is a byte offset for binary formats and
/// a 1-based line number for text formats; `unit()` says which.
class ParseError : public ValidationError {
 public:
  enum class Unit { byte, line };
  ParseError(const std::string& what, std::size_t offset, Unit unit);
  std::size_t offset() const noexcept { return offset_; }
  Unit unit() const noexcept { return unit_; }

 private:
  std::size_t offset_;
  Unit unit_;
};

class DegenerateDataError : public Error {
 public:
  explicit DegenerateDataError(const std::string& what) : Error(ErrorKind::degenerate_data, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

/// CLI exit status for an error category: 2 configuration, 3 validation and
/// I/O, 4 degenerate data.
int exit_code(ErrorKind kind) noexcept;

/// Rethrows `e` as the same category with `prefix` prepended to the message.
[[noreturn]] void rethrow_with_context(const Error& e, const std::string& prefix);

}  // namespace intdim
