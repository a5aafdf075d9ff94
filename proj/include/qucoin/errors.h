#ifndef QUCOIN_ERRORS_H
#define QUCOIN_ERRORS_H

#include <stdexcept>
#include <string>
#include <string_view>

namespace qucoin {

enum class ErrorCode {
    kInvalidArgument,
    kLengthMismatch,
    kDimensionOutOfRange,
    kBackendCapacity,
    kUnsupportedState,
    kDestroyedUnit,
    kMaxRetriesExceeded,
    kDoubleSpendAttempt,
    kWrongKey,
    kMalformedRequest,
    kRejected,
    kUnauthorized,
    kUnknownToken,
    kUnknownContract,
    kInvalidSignature,
    kInsufficientValue,
    kAlreadySettled,
    kInsufficientFunds,
    kChannelDropped,
    kVerificationFailed,
    kConfig,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// protocol code can map it onto an outcome without string matching.
class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, const std::string &what) : std::runtime_error(what), code_(code) {
    }
    ErrorCode code() const noexcept {
        return code_;
    }

   private:
    ErrorCode code_;
};

}  // namespace qucoin

#endif
