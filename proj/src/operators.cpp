#include "isorec/operators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include "isorec/error.hpp"

namespace isorec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this |kappa t| the antiderivative switches from the difference
// quotient to its midpoint Taylor expansion (truncation ~ h^6 / 3e5).
constexpr double kDividedDifferenceSwitch = 0.02;

bool finite(double x) { return std::isfinite(x); }

void require_nonnegative(double t, const char* what)
{
    if (!(t >= 0.0) || !finite(t)) {
        throw Error(ErrorCode::kDomain, std::string(what) + ": argument must be finite and >= 0");
    }
}

/// M_k(z) = integral_0^1 u^k e^{z u} du for real or complex z.
template <class T>
T exp_moment(int k, T z)
{
    if (std::abs(z) < 3.0) {
        T term = T(1.0);
        T sum = T(1.0 / (k + 1));
        for (int j = 1; j < 96; ++j) {
            term *= z / static_cast<double>(j);
            const T add = term / static_cast<double>(j + k + 1);
            sum += add;
            if (std::abs(add) <= 1e-18 * std::abs(sum)) {
                break;
            }
        }
        return sum;
    }
    const T ez = std::exp(z);
    T m = (ez - T(1.0)) / z;
    for (int i = 1; i <= k; ++i) {
        m = (ez - static_cast<double>(i) * m) / z;
    }
    return m;
}

// sinh(sqrt(x))/sqrt(x), continued analytically to x < 0.
double shc(double x)
{
    if (std::abs(x) < 1e-6) {
        return 1.0 + x / 6.0 + x * x / 120.0;
    }
    if (x > 0.0) {
        const double s = std::sqrt(x);
        return std::sinh(s) / s;
    }
    const double s = std::sqrt(-x);
    return std::sin(s) / s;
}

// cosh(sqrt(x)), continued analytically to x < 0.
double chc(double x)
{
    if (x >= 0.0) {
        return std::cosh(std::sqrt(x));
    }
    return std::cos(std::sqrt(-x));
}

double shared_scale(const OperatorClass& op)
{
    return std::visit(
        [](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, DoubleRoot>) {
                return std::max(1.0, std::abs(v.alpha));
            } else {
                return std::max({1.0, std::abs(v.alpha), std::abs(v.beta)});
            }
        },
        op.variant());
}

}  // namespace

OperatorClass OperatorClass::double_root(double alpha)
{
    if (!finite(alpha)) {
        throw Error(ErrorCode::kInvalidCoefficients, "double root must be finite");
    }
    return OperatorClass(DoubleRoot{alpha});
}

OperatorClass OperatorClass::distinct_real(double alpha, double beta)
{
    if (!finite(alpha) || !finite(beta)) {
        throw Error(ErrorCode::kInvalidCoefficients, "real roots must be finite");
    }
    if (!(alpha < beta)) {
        throw Error(ErrorCode::kInvalidCoefficients, "distinct real roots require alpha < beta");
    }
    return OperatorClass(DistinctReal{alpha, beta});
}

OperatorClass OperatorClass::complex_pair(double alpha, double beta)
{
    if (!finite(alpha) || !finite(beta)) {
        throw Error(ErrorCode::kInvalidCoefficients, "complex root parts must be finite");
    }
    if (!(beta > 0.0)) {
        throw Error(ErrorCode::kInvalidCoefficients, "complex pair requires beta > 0");
    }
    return OperatorClass(ComplexPair{alpha, beta});
}

OperatorSpec OperatorClass::coefficients() const noexcept
{
    return std::visit(
        [](const auto& v) -> OperatorSpec {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, DoubleRoot>) {
                return {-2.0 * v.alpha, v.alpha * v.alpha};
            } else if constexpr (std::is_same_v<V, DistinctReal>) {
                return {-(v.alpha + v.beta), v.alpha * v.beta};
            } else {
                return {-2.0 * v.alpha, v.alpha * v.alpha + v.beta * v.beta};
            }
        },
        variant_);
}

double OperatorClass::mean_root() const noexcept
{
    return std::visit(
        [](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, DistinctReal>) {
                return 0.5 * (v.alpha + v.beta);
            } else {
                return v.alpha;
            }
        },
        variant_);
}

double OperatorClass::half_gap_squared() const noexcept
{
    return std::visit(
        [](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, DoubleRoot>) {
                return 0.0;
            } else if constexpr (std::is_same_v<V, DistinctReal>) {
                const double k = 0.5 * (v.beta - v.alpha);
                return k * k;
            } else {
                return -v.beta * v.beta;
            }
        },
        variant_);
}

bool OperatorClass::is_self_adjoint(double tol) const noexcept
{
    return std::abs(coefficients().p) <= tol * shared_scale(*this);
}

std::string OperatorClass::describe() const
{
    const OperatorSpec c = coefficients();
    std::ostringstream os;
    os.precision(6);
    os << "D^2";
    if (c.p != 0.0) {
        os << (c.p > 0 ? "+" : "-") << std::abs(c.p) << "D";
    }
    if (c.q != 0.0) {
        os << (c.q > 0 ? "+" : "-") << std::abs(c.q);
    }
    return os.str();
}

double default_classification_tolerance(OperatorSpec spec) noexcept
{
    return 1e-12 * std::max({1.0, spec.p * spec.p, std::abs(spec.q)});
}

OperatorClass classify(OperatorSpec spec)
{
    if (!finite(spec.p) || !finite(spec.q)) {
        throw Error(ErrorCode::kInvalidCoefficients, "coefficients p and q must be finite");
    }
    return classify(spec, default_classification_tolerance(spec));
}

OperatorClass classify(OperatorSpec spec, double tol)
{
    if (!finite(spec.p) || !finite(spec.q)) {
        throw Error(ErrorCode::kInvalidCoefficients, "coefficients p and q must be finite");
    }
    if (!(tol >= 0.0)) {
        throw Error(ErrorCode::kInvalidParameter, "classification tolerance must be >= 0");
    }
    const double sigma = -0.5 * spec.p;
    const double disc = spec.p * spec.p - 4.0 * spec.q;
    if (std::abs(disc) <= tol) {
        return OperatorClass::double_root(sigma);
    }
    if (disc > 0.0) {
        const double kappa = 0.5 * std::sqrt(disc);
        return OperatorClass::distinct_real(sigma - kappa, sigma + kappa);
    }
    return OperatorClass::complex_pair(sigma, 0.5 * std::sqrt(-disc));
}

double green_kernel(const OperatorClass& op, double t)
{
    require_nonnegative(t, "g");
    const double x = op.half_gap_squared() * t * t;
    return t * std::exp(-op.mean_root() * t) * shc(x);
}

double green_kernel_derivative(const OperatorClass& op, double t)
{
    require_nonnegative(t, "g'");
    const double sigma = op.mean_root();
    const double x = op.half_gap_squared() * t * t;
    return std::exp(-sigma * t) * (chc(x) - sigma * t * shc(x));
}

double green_antiderivative(const OperatorClass& op, double t)
{
    require_nonnegative(t, "G");
    if (t == 0.0) {
        return 0.0;
    }
    // G(t) = t^2 * M0[z_a, z_b], the divided difference of M0 at z = -root * t.
    const double sigma = op.mean_root();
    const double kappa2 = op.half_gap_squared();
    const double m = -sigma * t;
    const double h2 = 4.0 * kappa2 * t * t;
    double dd = 0.0;
    if (std::abs(h2) <= kDividedDifferenceSwitch * kDividedDifferenceSwitch) {
        dd = exp_moment(1, m) + exp_moment(3, m) * h2 / 24.0 +
             exp_moment(5, m) * h2 * h2 / 1920.0;
    } else if (const auto* dr = std::get_if<DistinctReal>(&op.variant())) {
        dd = (exp_moment(0, -dr->alpha * t) - exp_moment(0, -dr->beta * t)) /
             ((dr->beta - dr->alpha) * t);
    } else {
        const auto& cp = std::get<ComplexPair>(op.variant());
        const std::complex<double> z(-cp.alpha * t, cp.beta * t);
        dd = exp_moment(0, z).imag() / (cp.beta * t);
    }
    return t * t * dd;
}

double monotonicity_threshold(const OperatorClass& op) noexcept
{
    return std::visit(
        [](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, DoubleRoot>) {
                return v.alpha <= 0.0 ? kInf : 1.0 / v.alpha;
            } else if constexpr (std::is_same_v<V, DistinctReal>) {
                // g' = (beta e^{-beta t} - alpha e^{-alpha t}) / (beta - alpha) only
                // vanishes when both roots are positive.
                if (v.alpha <= 0.0) {
                    return kInf;
                }
                return std::log1p((v.beta - v.alpha) / v.alpha) / (v.beta - v.alpha);
            } else {
                // First zero of beta cos(beta t) - alpha sin(beta t).
                return std::atan2(v.beta, v.alpha) / v.beta;
            }
        },
        op.variant());
}

namespace {

void require_segment(const OperatorClass& op, double a, const char* what)
{
    if (!(a > 0.0) || !finite(a)) {
        throw Error(ErrorCode::kDomain, std::string(what) + ": segment length a must be finite and > 0");
    }
    const double delta = monotonicity_threshold(op);
    if (!(a < delta)) {
        std::ostringstream os;
        os.precision(17);
        os << what << ": a = " << a << " is not below the monotonicity threshold delta = " << delta
           << " of " << op.describe();
        throw Error(ErrorCode::kOutOfRange, os.str());
    }
}

}  // namespace

double t_zero(const OperatorClass& op, double a)
{
    require_segment(op, a, "t_zero");
    const double target = 0.5 * green_kernel(op, a);
    double lo = 0.0;
    double hi = a;
    while (hi - lo > 1e-14 * a) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double gm = green_kernel(op, mid);
        if (gm == target) {
            lo = hi = mid;
            break;
        }
        (gm < target ? lo : hi) = mid;
    }
    double t = 0.5 * (lo + hi);
    const double slope = green_kernel_derivative(op, t);
    if (slope > 0.0) {
        const double polished = t - (green_kernel(op, t) - target) / slope;
        if (polished > 0.0 && polished < a) {
            t = polished;
        }
    }
    return t;
}

double ext1(const OperatorClass& op, double a)
{
    require_segment(op, a, "ext1");
    return green_antiderivative(op, a);
}

double ext2(const OperatorClass& op, double a)
{
    require_segment(op, a, "ext2");
    return green_antiderivative(op, a) - 2.0 * green_antiderivative(op, t_zero(op, a));
}

ExtremalProfile extremal_profile(const OperatorClass& op, double a)
{
    require_segment(op, a, "extremal_profile");
    const double t0 = t_zero(op, a);
    const double big = green_antiderivative(op, a);
    return ExtremalProfile{op, a, monotonicity_threshold(op), t0, big,
                           big - 2.0 * green_antiderivative(op, t0)};
}

double ExtremalProfile::h_tilde(double t) const
{
    require_nonnegative(t, "h_tilde");
    if (t > a) {
        return 0.0;
    }
    if (t <= t0) {
        return green_antiderivative(op, a - t) - 2.0 * green_antiderivative(op, t0 - t);
    }
    return green_antiderivative(op, a - t);
}

double ExtremalProfile::h_tilde_derivative(double t) const
{
    require_nonnegative(t, "h_tilde'");
    if (t > a) {
        return 0.0;
    }
    if (t <= t0) {
        return -green_kernel(op, a - t) + 2.0 * green_kernel(op, t0 - t);
    }
    return -green_kernel(op, a - t);
}

double ExtremalProfile::h_tilde_second_derivative(double t) const
{
    require_nonnegative(t, "h_tilde''");
    if (t >= a) {
        return 0.0;
    }
    if (t < t0) {
        return green_kernel_derivative(op, a - t) - 2.0 * green_kernel_derivative(op, t0 - t);
    }
    return green_kernel_derivative(op, a - t);
}

double h_tilde(const OperatorClass& op, double a, double t)
{
    return extremal_profile(op, a).h_tilde(t);
}

}  // namespace isorec
