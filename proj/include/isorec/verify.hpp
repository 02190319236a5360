#pragma once

#include <optional>
#include <string>
#include <vector>

#include "isorec/operators.hpp"

namespace isorec {

struct NamedOperator {
    std::string name;
    OperatorClass op;
};

/// Three per root type, including a zero root, a near-degenerate gap and a
/// root pair straddling zero.
std::vector<NamedOperator> representative_operators();

/// D^2, D^2 - 1 and D^2 + 1.
std::vector<NamedOperator> self_adjoint_families();

/// min(delta, cap): the largest argument sampled for an operator.
double kernel_span(const OperatorClass& op, double cap = 10.0);

enum class CheckStatus { kPass, kFail, kSkipped };

const char* to_string(CheckStatus s) noexcept;

struct CheckResult {
    std::string group;
    std::string name;
    CheckStatus status = CheckStatus::kPass;
    double residual = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct VerifyOptions {
    /// Restrict the univariate checks, fooling and sandwich to one operator.
    std::optional<OperatorClass> op;
    bool kernel = true;
    bool l1 = true;
    bool bvp = true;
    bool membership = true;
    bool fooling = true;
    bool sandwich = true;
    bool inject_half_factor = false;
    int fooling_points = 200;
    int fooling_dirs = 10;
    unsigned long long seed = 0;
};

struct VerifySummary {
    std::vector<CheckResult> checks;

    std::size_t count(CheckStatus s) const;
    bool ok() const { return count(CheckStatus::kFail) == 0; }
};

/// Oracle cross-checks. Failures are recorded per item; library errors raised
/// inside a check become failed items, never exceptions.
VerifySummary run_verify_suite(const VerifyOptions& opt);

}  // namespace isorec
