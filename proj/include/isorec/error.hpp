#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace isorec {

enum class ErrorCode {
    kInvalidCoefficients,
    kDomain,
    kOutOfRange,
    kOracleFailure,
    kPrecondition,
    kDimensionMismatch,
    kEmptyNodeSet,
    kBudget,
    kUnsupportedDimension,
    kUnsupportedOperator,
    kInvalidParameter,
    kNTooSmall,
    kInvalidConfig,
    kIo,
};

/// Machine-readable kebab-case name, e.g. "out-of-range".
std::string_view error_code_name(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto a stable exit status and JSON error object.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace isorec
