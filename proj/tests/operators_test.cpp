#include <cmath>
#include <numbers>

#include "doctest.h"
#include "isorec/error.hpp"
#include "isorec/operators.hpp"
#include "isorec/univariate_oracle.hpp"
#include "support/representative.hpp"

using namespace isorec;
using isorec::testing::kernel_span;
using isorec::testing::representative_operators;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an isorec::Error");
    return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("classify splits on the discriminant")
{
    const auto d = classify({0.0, 0.0});
    REQUIRE(std::holds_alternative<DoubleRoot>(d.variant()));
    CHECK(std::get<DoubleRoot>(d.variant()).alpha == 0.0);

    const auto r = classify({0.0, -1.0});
    REQUIRE(std::holds_alternative<DistinctReal>(r.variant()));
    CHECK(std::get<DistinctReal>(r.variant()).alpha == -1.0);
    CHECK(std::get<DistinctReal>(r.variant()).beta == 1.0);

    const auto c = classify({0.0, 1.0});
    REQUIRE(std::holds_alternative<ComplexPair>(c.variant()));
    CHECK(std::get<ComplexPair>(c.variant()).alpha == 0.0);
    CHECK(std::get<ComplexPair>(c.variant()).beta == 1.0);

    // Discriminant 1e-13 is inside the default tolerance.
    CHECK(std::holds_alternative<DoubleRoot>(classify({2.0, 1.0 - 2.5e-14}).variant()));
    CHECK(std::holds_alternative<DistinctReal>(classify({2.0, 1.0 - 1e-6}).variant()));
}

TEST_CASE("classify round-trips coefficients")
{
    for (const OperatorSpec s : {OperatorSpec{0.0, 0.0}, OperatorSpec{-1.0, 0.25}, OperatorSpec{3.0, -4.0},
                                 OperatorSpec{-1.0, 4.25}, OperatorSpec{0.6, 0.58}, OperatorSpec{0.0, 7.0}}) {
        const OperatorSpec back = classify(s).coefficients();
        CHECK(back.p == doctest::Approx(s.p).epsilon(1e-14));
        CHECK(back.q == doctest::Approx(s.q).epsilon(1e-14));
    }
}

TEST_CASE("invalid coefficients and arguments")
{
    CHECK(code_of([] { classify({std::nan(""), 0.0}); }) == ErrorCode::kInvalidCoefficients);
    CHECK(code_of([] { classify({0.0, INFINITY}); }) == ErrorCode::kInvalidCoefficients);
    CHECK(code_of([] { OperatorClass::distinct_real(1.0, 1.0); }) == ErrorCode::kInvalidCoefficients);
    CHECK(code_of([] { OperatorClass::complex_pair(0.0, 0.0); }) == ErrorCode::kInvalidCoefficients);
    const auto op = OperatorClass::double_root(0.0);
    CHECK(code_of([&] { green_kernel(op, -1e-300); }) == ErrorCode::kDomain);
    CHECK(code_of([&] { green_kernel_derivative(op, -1.0); }) == ErrorCode::kDomain);
    CHECK(code_of([&] { green_antiderivative(op, -1.0); }) == ErrorCode::kDomain);
    const auto osc = OperatorClass::complex_pair(0.0, 1.0);
    CHECK(code_of([&] { ext2(osc, 2.0); }) == ErrorCode::kOutOfRange);
    CHECK(code_of([&] { ext1(osc, kPi / 2); }) == ErrorCode::kOutOfRange);
    CHECK(code_of([&] { t_zero(osc, 0.0); }) == ErrorCode::kDomain);
}

TEST_CASE("kernel closed forms")
{
    const auto d2 = OperatorClass::double_root(0.0);
    for (double t : {0.0, 0.3, 1.0, 7.5}) {
        CHECK(green_kernel(d2, t) == doctest::Approx(t).epsilon(1e-15));
        CHECK(green_kernel_derivative(d2, t) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(green_antiderivative(d2, t) == doctest::Approx(t * t / 2).epsilon(1e-15));
    }
    const auto hyp = OperatorClass::distinct_real(-1.0, 1.0);
    CHECK(green_kernel(hyp, 1.0) == doctest::Approx(1.1752011936438014).epsilon(1e-15));
    CHECK(green_kernel_derivative(hyp, 1.0) == doctest::Approx(1.5430806348152437).epsilon(1e-15));
    for (double b : {0.5, 1.0, 2.0}) {
        const auto op = OperatorClass::distinct_real(-b, b);
        for (double t : {0.01, 0.2, 0.49}) {
            CHECK(green_antiderivative(op, t) ==
                  doctest::Approx((std::cosh(b * t) - 1) / (b * b)).epsilon(1e-13));
        }
    }
    const auto osc = OperatorClass::complex_pair(0.0, 2.0);
    CHECK(green_kernel(osc, kPi / 4) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(green_antiderivative(osc, kPi / 4) == doctest::Approx(0.25).epsilon(1e-14));

    // Damped oscillator e^{-0.5t} sin(2t)/2 and its antiderivative.
    const auto damp = OperatorClass::complex_pair(0.5, 2.0);
    const double t = 0.6;
    CHECK(green_kernel(damp, t) == doctest::Approx(std::exp(-0.5 * t) * std::sin(2 * t) / 2).epsilon(1e-15));
    const double G = (1.0 - std::exp(-0.5 * t) * (std::cos(2 * t) + 0.25 * std::sin(2 * t))) / 4.25;
    CHECK(green_antiderivative(damp, t) == doctest::Approx(G).epsilon(1e-14));

    // Single zero root: G = (t + (e^{-bt} - 1)/b)/b.
    const auto zero_root = OperatorClass::distinct_real(0.0, 1.5);
    CHECK(green_antiderivative(zero_root, 0.4) ==
          doctest::Approx((0.4 + (std::exp(-0.6) - 1) / 1.5) / 1.5).epsilon(1e-14));
}

TEST_CASE("every kernel starts at g(0)=0, g'(0)=1 and solves the adjoint equation")
{
    for (const auto& [name, op] : representative_operators()) {
        CAPTURE(name);
        CHECK(green_kernel(op, 0.0) == 0.0);
        CHECK(green_kernel_derivative(op, 0.0) == 1.0);
        CHECK(green_antiderivative(op, 0.0) == 0.0);
        // g'' - p g' + q g = 0, checked with a fourth-order stencil on g'.
        const OperatorSpec c = op.coefficients();
        const double h = 1e-3;
        for (double t : {0.1, 0.3, 0.45}) {
            const double d2 = (-green_kernel_derivative(op, t + 2 * h) + 8 * green_kernel_derivative(op, t + h) -
                               8 * green_kernel_derivative(op, t - h) + green_kernel_derivative(op, t - 2 * h)) /
                              (12 * h);
            const double res = d2 - c.p * green_kernel_derivative(op, t) + c.q * green_kernel(op, t);
            CHECK(std::abs(res) < 1e-9);
        }
        // g' matches a central difference of g.
        const double t = 0.37;
        const double fd = (green_kernel(op, t + 1e-6) - green_kernel(op, t - 1e-6)) / 2e-6;
        CHECK(green_kernel_derivative(op, t) == doctest::Approx(fd).epsilon(1e-8));
    }
}

TEST_CASE("G agrees with adaptive quadrature of g")
{
    const QuadratureSpec quad{};
    for (const auto& [name, op] : representative_operators()) {
        CAPTURE(name);
        const double span = kernel_span(op);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double t = span * i / 1000.0;
            const double G = green_antiderivative(op, t);
            const double q = integrate([&](double s) { return green_kernel(op, s); }, 0.0, t, {}, quad);
            worst = std::max(worst, std::abs(G - q) / std::max(1.0, G));
        }
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("delta follows the root-type table")
{
    CHECK(monotonicity_threshold(OperatorClass::double_root(-1.0)) == INFINITY);
    CHECK(monotonicity_threshold(OperatorClass::double_root(0.0)) == INFINITY);
    CHECK(monotonicity_threshold(OperatorClass::double_root(0.5)) == doctest::Approx(2.0));
    // Real roots of opposite sign or both non-positive: g' > 0 everywhere.
    CHECK(monotonicity_threshold(OperatorClass::distinct_real(-1.0, 2.0)) == INFINITY);
    CHECK(monotonicity_threshold(OperatorClass::distinct_real(-2.0, -1.0)) == INFINITY);
    CHECK(monotonicity_threshold(OperatorClass::distinct_real(0.0, 1.0)) == INFINITY);
    CHECK(monotonicity_threshold(OperatorClass::distinct_real(1.0, 2.0)) == doctest::Approx(std::log(2.0)));
    CHECK(monotonicity_threshold(OperatorClass::distinct_real(1.0, 1.0 + 1e-9)) == doctest::Approx(1.0));
    CHECK(monotonicity_threshold(OperatorClass::complex_pair(0.0, 1.0)) == doctest::Approx(kPi / 2));
    CHECK(monotonicity_threshold(OperatorClass::complex_pair(-1.0, 1.0)) == doctest::Approx(3 * kPi / 4));
    CHECK(monotonicity_threshold(OperatorClass::complex_pair(1.0, 1.0)) == doctest::Approx(kPi / 4));
    CHECK(monotonicity_threshold(OperatorClass::complex_pair(1.0, 2.0)) == doctest::Approx(std::atan(2.0) / 2));

    // Past delta, g' really does change sign.
    for (const auto& [name, op] : representative_operators()) {
        const double d = monotonicity_threshold(op);
        if (std::isfinite(d)) {
            CAPTURE(name);
            CHECK(green_kernel_derivative(op, d * (1 - 1e-6)) > 0.0);
            CHECK(green_kernel_derivative(op, d * (1 + 1e-6)) < 0.0);
        }
    }
}

TEST_CASE("g increases and G is convex below delta")
{
    for (const auto& [name, op] : representative_operators()) {
        CAPTURE(name);
        const double span = kernel_span(op) - 1e-6;
        const double h = span / 999.0;
        double prev = green_kernel(op, 0.0);
        for (int i = 1; i < 1000; ++i) {
            const double g = green_kernel(op, h * i);
            CHECK(g > prev);
            prev = g;
        }
        for (int i = 1; i < 999; ++i) {
            const double d2 = green_antiderivative(op, h * (i + 1)) - 2 * green_antiderivative(op, h * i) +
                              green_antiderivative(op, h * (i - 1));
            CHECK(d2 >= -1e-8);
        }
    }
}

TEST_CASE("t0 halves the kernel")
{
    CHECK(std::abs(t_zero(OperatorClass::double_root(0.0), 1.0) - 0.5) <= 1e-14);
    CHECK(std::abs(t_zero(OperatorClass::double_root(0.0), 0.3) - 0.15) <= 1e-14);
    CHECK(t_zero(OperatorClass::distinct_real(-1.0, 1.0), 1.0) ==
          doctest::Approx(std::asinh(std::sinh(1.0) / 2)).epsilon(1e-14));
    CHECK(t_zero(OperatorClass::complex_pair(0.0, 1.0), 1.0) ==
          doctest::Approx(std::asin(std::sin(1.0) / 2)).epsilon(1e-14));
    for (const auto& [name, op] : representative_operators()) {
        CAPTURE(name);
        for (double frac : {0.05, 0.5, 0.95}) {
            const double a = frac * kernel_span(op, 3.0);
            const double t0 = t_zero(op, a);
            CHECK(t0 > 0.0);
            CHECK(t0 < a);
            const double ga = green_kernel(op, a);
            CHECK(std::abs(green_kernel(op, t0) - ga / 2) <= 1e-13 * std::max(1.0, ga));
        }
    }
}

TEST_CASE("extremal values")
{
    const auto d2 = OperatorClass::double_root(0.0);
    for (double a : {1e-3, 0.2, 1.0, 5.0}) {
        CHECK(std::abs(ext1(d2, a) - a * a / 2) <= 1e-12 * std::max(1.0, a * a));
        CHECK(std::abs(ext2(d2, a) - a * a / 4) <= 1e-12 * std::max(1.0, a * a));
    }
    const auto hyp = OperatorClass::distinct_real(-1.0, 1.0);
    CHECK(ext1(hyp, 1.0) == doctest::Approx(std::cosh(1.0) - 1).epsilon(1e-14));
    const double c1 = std::cosh(1.0);
    CHECK(std::abs(ext2(hyp, 1.0) - (c1 + 1 - std::sqrt(c1 * c1 + 3))) <= 1e-12);
    CHECK(ext2(hyp, 1.0) == doctest::Approx(0.2233611).epsilon(1e-6));

    for (double b : {0.5, 1.0, 2.0}) {
        const auto op = OperatorClass::distinct_real(-b, b);
        for (double a : {0.3, 1.0}) {
            const double ch = std::cosh(b * a);
            CHECK(std::abs(ext2(op, a) - (1 + ch - std::sqrt(ch * ch + 3)) / (b * b)) <= 1e-10);
        }
    }

    for (const auto& [name, op] : representative_operators()) {
        CAPTURE(name);
        const double a = 1e-3;
        CHECK(std::abs(ext1(op, a) / (a * a / 2) - 1) <= 0.01);
        CHECK(std::abs(ext2(op, a) / (a * a / 4) - 1) <= 0.01);
        double prev = 0.0;
        for (int i = 1; i < 200; ++i) {
            const double x = kernel_span(op, 3.0) * i / 200.0;
            const double e2 = ext2(op, x);
            CHECK(e2 > prev);
            CHECK(e2 < ext1(op, x));
            prev = e2;
        }
    }
}

TEST_CASE("extremal function shape")
{
    for (const auto& [name, op] : representative_operators()) {
        CAPTURE(name);
        const double a = 0.8 * kernel_span(op, 1.5);
        const ExtremalProfile pr = extremal_profile(op, a);
        CHECK(pr.t0 > 0.0);
        CHECK(pr.t0 < a);
        CHECK(pr.ext2 < pr.ext1);
        CHECK(std::abs(pr.h_tilde(0.0) - pr.ext2) <= 1e-12);
        CHECK(std::abs(pr.h_tilde(a)) <= 1e-15);
        CHECK(pr.h_tilde(1.5 * a) == 0.0);
        const double s = 1e-6 * a;
        CHECK(std::abs((pr.h_tilde(a) - pr.h_tilde(a - s)) / s) <= 1e-9 + 1e-6);
        CHECK(std::abs((pr.h_tilde(s) - pr.h_tilde(0.0)) / s) <= 1e-9 + 1e-6);
        CHECK(std::abs(pr.h_tilde_derivative(0.0)) <= 1e-12);
        CHECK(std::abs(pr.h_tilde_derivative(a)) <= 1e-15);
        // Continuity of h and h' across t0.
        CHECK(pr.h_tilde(pr.t0 * (1 - 1e-12)) == doctest::Approx(pr.h_tilde(pr.t0 * (1 + 1e-12))).epsilon(1e-9));
        CHECK(pr.h_tilde_derivative(pr.t0 * (1 - 1e-12)) ==
              doctest::Approx(pr.h_tilde_derivative(pr.t0 * (1 + 1e-12))).epsilon(1e-9));
        CHECK(h_tilde(op, a, 0.0) == doctest::Approx(pr.ext2));
    }

    // D^2: h(t) = a^2/4 - t^2/2 up to a/2.
    const auto d2 = OperatorClass::double_root(0.0);
    const ExtremalProfile p = extremal_profile(d2, 1.0);
    for (double t : {0.0, 0.1, 0.25, 0.5}) {
        CHECK(p.h_tilde(t) == doctest::Approx(0.25 - t * t / 2).epsilon(1e-14));
    }
    CHECK(p.h_tilde(0.75) == doctest::Approx(0.125 / 2 / 2).epsilon(1e-14));
}

TEST_CASE("extremal function decreases for the three self-adjoint families")
{
    for (const auto& op : {OperatorClass::double_root(0.0), OperatorClass::distinct_real(-1.0, 1.0),
                           OperatorClass::distinct_real(-2.0, 2.0), OperatorClass::complex_pair(0.0, 1.0),
                           OperatorClass::complex_pair(0.0, 3.0)}) {
        CAPTURE(op.describe());
        const double a = 0.95 * kernel_span(op, 2.0);
        const ExtremalProfile pr = extremal_profile(op, a);
        double prev = pr.h_tilde(0.0);
        for (int i = 1; i <= 2000; ++i) {
            const double v = pr.h_tilde(a * i / 2000.0);
            CHECK(v <= prev + 1e-15);
            prev = v;
        }
    }
}
