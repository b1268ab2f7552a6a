#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ieikit {

enum class ErrorCode {
    MalformedHeader,
    ChecksumMismatch,
    InvariantViolation,
    UnknownId,
    DimMismatch,
    DuplicateId,
    EmptyTable,
    AbsentClass,
    MissingLogits,
    EmptyScores,
    InsufficientPool,
    DivergenceDetected,
    EmptyDistances,
    InvalidArgument,
    IoError,
};

/// Stable, machine-readable name of an error code, e.g. "MISSING_LOGITS".
std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

} // namespace ieikit
