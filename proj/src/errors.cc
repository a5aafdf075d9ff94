#include "qucoin/errors.h"

namespace qucoin {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::kInvalidArgument:
            return "InvalidArgument";
        case ErrorCode::kLengthMismatch:
            return "LengthMismatch";
        case ErrorCode::kDimensionOutOfRange:
            return "DimensionOutOfRange";
        case ErrorCode::kBackendCapacity:
            return "BackendCapacity";
        case ErrorCode::kUnsupportedState:
            return "UnsupportedState";
        case ErrorCode::kDestroyedUnit:
            return "DestroyedUnit";
        case ErrorCode::kMaxRetriesExceeded:
            return "MaxRetriesExceeded";
        case ErrorCode::kDoubleSpendAttempt:
            return "DoubleSpendAttempt";
        case ErrorCode::kWrongKey:
            return "WrongKey";
        case ErrorCode::kMalformedRequest:
            return "MalformedRequest";
        case ErrorCode::kRejected:
            return "Rejected";
        case ErrorCode::kUnauthorized:
            return "Unauthorized";
        case ErrorCode::kUnknownToken:
            return "UnknownToken";
        case ErrorCode::kUnknownContract:
            return "UnknownContract";
        case ErrorCode::kInvalidSignature:
            return "InvalidSignature";
        case ErrorCode::kInsufficientValue:
            return "InsufficientValue";
        case ErrorCode::kAlreadySettled:
            return "AlreadySettled";
        case ErrorCode::kInsufficientFunds:
            return "InsufficientFunds";
        case ErrorCode::kChannelDropped:
            return "ChannelDropped";
        case ErrorCode::kVerificationFailed:
            return "VerificationFailed";
        case ErrorCode::kConfig:
            return "ConfigError";
    }
    return "Unknown";
}

}  // namespace qucoin
