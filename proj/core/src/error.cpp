#include "arc/error.hpp"

namespace arc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::InsufficientWorkers: return "InsufficientWorkers";
    case ErrorCode::TooManyByzantine: return "TooManyByzantine";
    case ErrorCode::NegativeThreshold: return "NegativeThreshold";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::NoHonestWorkers: return "NoHonestWorkers";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::EmptyWorkerRetry: return "EmptyWorkerRetry";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::Io: return "Io";
    case ErrorCode::DivergenceGuard: return "DivergenceGuard";
    case ErrorCode::UnknownLipschitz: return "UnknownLipschitz";
    case ErrorCode::TooManySubsets: return "TooManySubsets";
    case ErrorCode::AllClipped: return "AllClipped";
    case ErrorCode::ParameterDomain: return "ParameterDomain";
    case ErrorCode::EmptyInput: return "EmptyInput";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void raise(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace arc
