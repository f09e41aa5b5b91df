#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace propertime {

enum class ErrorKind {
  NonpositiveMass,
  DegenerateSystem,
  UnexpectedKernel,
  GridTooCoarse,
  ZeroProjection,
  BadInterval,
  Aliased,
  ExpDiverged,
  ZeroEigenvalue,
  InvalidArgument,
  ParseError,
  ValidationError,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries one of the kinds above so that
// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace propertime
