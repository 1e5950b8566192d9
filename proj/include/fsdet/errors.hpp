#pragma once

#include <stdexcept>
#include <string>

namespace fsdet {

enum class ErrorKind {
  NotPSD,
  NotPD,
  DimensionMismatch,
  NonPositiveDiagonal,
  HeywoodCase,
  DegenerateWeights,
  TooFewRows,
  DomainError,
  RankDeficient,
  NoConvergence,
  EmptyGroup,
  InvalidArgument,
  Parse,
  Io,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so the
/// CLI can map it onto an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace fsdet
