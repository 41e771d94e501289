#include "intdim/errors.hpp"

namespace intdim {

namespace {

std::string with_offset(const std::string& what, std::size_t offset, ParseError::Unit unit) {
  return what + (unit == ParseError::Unit::byte ? " (at byte " : " (at line ") + std::to_string(offset) + ")";
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t offset, Unit unit)
    : ValidationError(with_offset(what, offset, unit)), offset_(offset), unit_(unit) {}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::configuration:
      return 2;
    case ErrorKind::validation:
    case ErrorKind::io:
      return 3;
    case ErrorKind::degenerate_data:
      return 4;
  }
  return 1;
}

void rethrow_with_context(const Error& e, const std::string& prefix) {
  const std::string what = prefix + e.what();
  switch (e.kind()) {
    case ErrorKind::configuration:
      throw ConfigError(what);
    case ErrorKind::validation:
      throw ValidationError(what);
    case ErrorKind::degenerate_data:
      throw DegenerateDataError(what);
    case ErrorKind::io:
      throw IoError(what);
  }
  throw Error(e.kind(), what);
}

}  // namespace intdim
