#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace arc {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NonFinite,
  InsufficientWorkers,
  TooManyByzantine,
  NegativeThreshold,
  EmptyGrid,
  NoHonestWorkers,
  LabelOutOfRange,
  EmptyWorkerRetry,
  BadMagic,
  CountMismatch,
  Truncated,
  Io,
  DivergenceGuard,
  UnknownLipschitz,
  TooManySubsets,
  AllClipped,
  ParameterDomain,
  EmptyInput,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can branch without parsing text.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

}  // namespace arc
