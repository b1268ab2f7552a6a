#include "ieikit/error.hpp"

namespace ieikit {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::MalformedHeader: return "MALFORMED_HEADER";
    case ErrorCode::ChecksumMismatch: return "CHECKSUM_MISMATCH";
    case ErrorCode::InvariantViolation: return "INVARIANT_VIOLATION";
    case ErrorCode::UnknownId: return "UNKNOWN_ID";
    case ErrorCode::DimMismatch: return "DIM_MISMATCH";
    case ErrorCode::DuplicateId: return "DUPLICATE_ID";
    case ErrorCode::EmptyTable: return "EMPTY_TABLE";
    case ErrorCode::AbsentClass: return "ABSENT_CLASS";
    case ErrorCode::MissingLogits: return "MISSING_LOGITS";
    case ErrorCode::EmptyScores: return "EMPTY_SCORES";
    case ErrorCode::InsufficientPool: return "INSUFFICIENT_POOL";
    case ErrorCode::DivergenceDetected: return "DIVERGENCE_DETECTED";
    case ErrorCode::EmptyDistances: return "EMPTY_DISTANCES";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::IoError: return "IO_ERROR";
    }
    return "UNKNOWN";
}

} // namespace ieikit
