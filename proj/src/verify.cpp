#include "isorec/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "isorec/error.hpp"
#include "isorec/geometry.hpp"
#include "isorec/recovery.hpp"
#include "isorec/univariate_oracle.hpp"

namespace isorec {

namespace {

std::string fmt(const char* pattern, double v)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

CheckResult item(std::string group, std::string name)
{
    CheckResult c;
    c.group = std::move(group);
    c.name = std::move(name);
    return c;
}

// Runs `body`, turning library errors into a failed item.
void guarded(VerifySummary& s, CheckResult base, const std::function<void(CheckResult&)>& body)
{
    try {
        body(base);
    } catch (const Error& e) {
        base.status = CheckStatus::kFail;
        base.detail = std::string(error_code_name(e.code())) + ": " + e.what();
    } catch (const std::exception& e) {
        base.status = CheckStatus::kFail;
        base.detail = e.what();
    }
    s.checks.push_back(std::move(base));
}

void settle(CheckResult& c)
{
    c.status = c.residual <= c.tolerance ? CheckStatus::kPass : CheckStatus::kFail;
}

// Unit-square grid at spacing 1/m plus the edge midpoints, so the boundary is
// covered twice as finely as the interior.
NodeSet framed_grid(int m)
{
    NodeSet xi{2, {}};
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m; ++j) xi.points.push_back(Point{double(i) / m, double(j) / m});
    for (int i = 0; i < m; ++i) {
        const double t = (i + 0.5) / m;
        xi.points.push_back(Point{t, 0.0});
        xi.points.push_back(Point{t, 1.0});
        xi.points.push_back(Point{0.0, t});
        xi.points.push_back(Point{1.0, t});
    }
    return xi;
}

void kernel_checks(VerifySummary& s, const std::vector<NamedOperator>& ops)
{
    for (const auto& [name, op] : ops) {
        guarded(s, item("quadrature-vs-G", name), [&](CheckResult& c) {
            const double span = kernel_span(op);
            auto g = [&](double t) { return green_kernel(op, t); };
            for (int i = 1; i <= 100; ++i) {
                const double t = span * i / 100;
                const double big = green_antiderivative(op, t);
                const double quad = integrate(g, 0.0, t, {}, QuadratureSpec{});
                c.residual = std::max(c.residual, std::abs(big - quad) / std::max(1.0, std::abs(big)));
            }
            c.tolerance = 1e-10;
            c.detail = "100 points on (0, " + fmt("%.6g", span) + "]";
            settle(c);
        });
    }
}

void l1_checks(VerifySummary& s, const std::vector<NamedOperator>& ops)
{
    for (const auto& [name, op] : ops) {
        for (double a : {0.1, 0.5, 0.9 * kernel_span(op, 2.0)}) {
            guarded(s, item("l1-vs-ext2", name + ", a=" + fmt("%.6g", a)), [&](CheckResult& c) {
                const L1Approximation best = l1_best_approx(op, a);
                const double e2 = ext2(op, a);
                c.residual = std::abs(best.value - e2) / std::max(1.0, e2);
                c.tolerance = 1e-6;
                const bool signs = sign_pattern_check(op, a, best.c0);
                c.detail = "c0=" + fmt("%.12g", best.c0) + ", sign pattern " + (signs ? "ok" : "violated");
                settle(c);
                if (!signs) c.status = CheckStatus::kFail;
            });
        }
    }
}

void bvp_checks(VerifySummary& s, const std::vector<NamedOperator>& ops)
{
    for (const auto& [name, op] : ops) {
        guarded(s, item("bvp-vs-h-tilde", name), [&](CheckResult& c) {
            const double a = 0.5 * kernel_span(op, 2.0);
            const ExtremalProfile pr = extremal_profile(op, a);
            const ControlFunction phi0 = ControlFunction::sign_switch(pr.t0);
            for (int i = 0; i <= 100; ++i) {
                const double t = a * i / 100;
                c.residual = std::max(c.residual, std::abs(solve_bvp(op, a, phi0, t) - pr.h_tilde(t)));
            }
            c.tolerance = 1e-8;
            c.detail = "101 points, a=" + fmt("%.6g", a);
            settle(c);
        });
    }
}

void membership_checks(VerifySummary& s, const std::vector<NamedOperator>& ops)
{
    for (const auto& [name, op] : ops) {
        guarded(s, item("class-membership", name), [&](CheckResult& c) {
            const double a = 0.8 * kernel_span(op, 1.5);
            const SampledFunction h = sample_extremal(extremal_profile(op, a), 1000);
            const MembershipResult m = class_membership_check(op, h);
            c.residual = m.max_residual;
            c.tolerance = 1 + 1e-6 + 10 * h.step * h.step;
            c.detail = "a=" + fmt("%.6g", a) + ", 1000 intervals";
            c.status = m.ok ? CheckStatus::kPass : CheckStatus::kFail;
        });
    }
}

void fooling_checks(VerifySummary& s, const std::vector<NamedOperator>& ops, const VerifyOptions& opt)
{
    for (const auto& [name, op] : ops) {
        if (!op.is_self_adjoint()) {
            CheckResult c = item("fooling", name);
            c.status = CheckStatus::kSkipped;
            c.detail = "fooling functions are only defined for p = 0";
            s.checks.push_back(c);
            continue;
        }
        for (int d : {2, 3}) {
            guarded(s, item("fooling", name + ", d=" + std::to_string(d)), [&](CheckResult& c) {
                const double a = 0.8 * std::min(monotonicity_threshold(op), 1.5);
                const FoolingFunction f(op, Point(d), a);
                const FoolingCheck r = verify_fooling_class(f, opt.fooling_points, opt.fooling_dirs, a / 400, opt.seed);
                c.residual = r.max_residual;
                c.tolerance = 1 + 1e-3;
                settle(c);
                if (r.abs_q_h0 > 1) c.status = CheckStatus::kFail;
                c.detail = "a=" + fmt("%.6g", a) + ", |q h(0)|=" + fmt("%.6g", r.abs_q_h0) +
                           ", max tangential term " + fmt("%.6g", r.max_tangential_term);
            });
        }
    }
}

void sandwich_checks(VerifySummary& s, const std::vector<NamedOperator>& ops, const VerifyOptions& opt)
{
    const auto square = ConvexBody::unit_cube(2);
    const NodeSet xi = framed_grid(8);
    const UpperBoundForm form = opt.inject_half_factor ? UpperBoundForm::kHalved : UpperBoundForm::kRadius;
    for (const auto& [name, op] : ops) {
        if (!op.is_self_adjoint()) {
            CheckResult c = item("sandwich", name);
            c.status = CheckStatus::kSkipped;
            c.detail = "the fooling lower bound needs p = 0";
            s.checks.push_back(c);
            continue;
        }
        guarded(s, item("sandwich", name), [&](CheckResult& c) {
            const ErrorReport r = exact_error(op, square, xi, 1e-3, form);
            c.residual = *r.lower / r.upper;
            c.tolerance = 1 + 1e-12;
            c.detail = "lower=" + fmt("%.12g", *r.lower) + ", upper=" + fmt("%.12g", r.upper) +
                       (opt.inject_half_factor ? ", halved upper bound" : "");
            settle(c);
        });
    }
}

}  // namespace

std::vector<NamedOperator> representative_operators()
{
    return {
        {"double root 0", OperatorClass::double_root(0.0)},
        {"double root -1", OperatorClass::double_root(-1.0)},
        {"double root 0.5", OperatorClass::double_root(0.5)},
        {"real roots -1, 1", OperatorClass::distinct_real(-1.0, 1.0)},
        {"real roots 0, 1.5", OperatorClass::distinct_real(0.0, 1.5)},
        {"real roots 0.5, 0.5+1e-6", OperatorClass::distinct_real(0.5, 0.5 + 1e-6)},
        {"complex 0 +- i", OperatorClass::complex_pair(0.0, 1.0)},
        {"complex 0.5 +- 2i", OperatorClass::complex_pair(0.5, 2.0)},
        {"complex -0.3 +- 0.7i", OperatorClass::complex_pair(-0.3, 0.7)},
    };
}

std::vector<NamedOperator> self_adjoint_families()
{
    return {
        {"D^2", OperatorClass::double_root(0.0)},
        {"D^2-1", OperatorClass::distinct_real(-1.0, 1.0)},
        {"D^2+1", OperatorClass::complex_pair(0.0, 1.0)},
    };
}

double kernel_span(const OperatorClass& op, double cap)
{
    return std::min(monotonicity_threshold(op), cap);
}

const char* to_string(CheckStatus s) noexcept
{
    switch (s) {
        case CheckStatus::kPass: return "pass";
        case CheckStatus::kFail: return "fail";
        case CheckStatus::kSkipped: return "skipped";
    }
    return "?";
}

std::size_t VerifySummary::count(CheckStatus s) const
{
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [s](const CheckResult& c) { return c.status == s; }));
}

VerifySummary run_verify_suite(const VerifyOptions& opt)
{
    std::vector<NamedOperator> univariate = representative_operators();
    std::vector<NamedOperator> families = self_adjoint_families();
    if (opt.op) {
        univariate = {{opt.op->describe(), *opt.op}};
        families = univariate;
    }
    VerifySummary s;
    if (opt.kernel) kernel_checks(s, univariate);
    if (opt.l1) l1_checks(s, univariate);
    if (opt.bvp) bvp_checks(s, univariate);
    if (opt.membership) membership_checks(s, univariate);
    if (opt.fooling) fooling_checks(s, families, opt);
    if (opt.sandwich) sandwich_checks(s, families, opt);
    return s;
}

}  // namespace isorec
