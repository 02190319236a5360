#include "isorec/error.hpp"

namespace isorec {

std::string_view error_code_name(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::kInvalidCoefficients: return "invalid-coefficients";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kOutOfRange: return "out-of-range";
    case ErrorCode::kOracleFailure: return "oracle-failure";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kEmptyNodeSet: return "empty-node-set";
    case ErrorCode::kBudget: return "budget";
    case ErrorCode::kUnsupportedDimension: return "unsupported-dimension";
    case ErrorCode::kUnsupportedOperator: return "unsupported-operator";
    case ErrorCode::kInvalidParameter: return "invalid-parameter";
    case ErrorCode::kNTooSmall: return "n-too-small";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kIo: return "io";
    }
    return "unknown";
}

}  // namespace isorec
