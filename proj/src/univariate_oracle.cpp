#include "isorec/univariate_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "isorec/error.hpp"

namespace isorec {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;

struct Panel {
    double lo;
    double hi;
    double value;
    double error;

    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel make_panel(const std::function<double(double)>& f, double lo, double hi)
{
    double err = 0.0;
    const double v = Rule::integrate(f, lo, hi, 0, 0.0, &err);
    // The rule reports its error on the reference interval [-1, 1].
    return Panel{lo, hi, v, err * 0.5 * (hi - lo)};
}

class NeumaierSum {
public:
    void add(double x)
    {
        const double t = sum_ + x;
        comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Globally adaptive: always bisect the panel with the largest error estimate.
double integrate_piece(const std::function<double(double)>& f, double lo, double hi,
                       const QuadratureSpec& quad, int& budget)
{
    std::priority_queue<Panel> heap;
    heap.push(make_panel(f, lo, hi));
    double total_err = heap.top().error;
    double total_abs = std::abs(heap.top().value);
    while (total_err > std::max(quad.abs_tol, quad.rel_tol * total_abs)) {
        if (--budget < 0) {
            std::ostringstream os;
            os.precision(3);
            os << "quadrature on [" << lo << ", " << hi << "] did not converge within "
               << quad.max_subdivisions << " subdivisions (error estimate " << total_err << ")";
            throw Error(ErrorCode::kOracleFailure, os.str());
        }
        const Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        const Panel left = make_panel(f, worst.lo, mid);
        const Panel right = make_panel(f, mid, worst.hi);
        total_err += left.error + right.error - worst.error;
        total_abs += std::abs(left.value) + std::abs(right.value) - std::abs(worst.value);
        heap.push(left);
        heap.push(right);
    }
    NeumaierSum sum;
    while (!heap.empty()) {
        sum.add(heap.top().value);
        heap.pop();
    }
    return sum.value();
}

}  // namespace

void validate(const QuadratureSpec& quad)
{
    if (!(quad.abs_tol >= 0.0) || !(quad.rel_tol >= 0.0)) {
        throw Error(ErrorCode::kInvalidParameter, "quadrature tolerances must be >= 0");
    }
    if (quad.max_subdivisions < 1) {
        throw Error(ErrorCode::kInvalidParameter, "max_subdivisions must be >= 1");
    }
}

ControlFunction::ControlFunction(std::function<double(double)> rule, std::vector<double> jumps)
    : rule_(std::move(rule)), jumps_(std::move(jumps))
{
    std::sort(jumps_.begin(), jumps_.end());
}

ControlFunction ControlFunction::constant(double c)
{
    if (!(std::abs(c) <= 1.0)) {
        throw Error(ErrorCode::kPrecondition, "control must satisfy |phi| <= 1");
    }
    return ControlFunction([c](double) { return c; }, {});
}

ControlFunction ControlFunction::sign_switch(double t0)
{
    return ControlFunction([t0](double tau) { return tau < t0 ? -1.0 : 1.0; }, {t0});
}

double ControlFunction::operator()(double tau) const
{
    const double v = rule_(tau);
    if (!(std::abs(v) <= 1.0 + 1e-12)) {
        throw Error(ErrorCode::kPrecondition, "control function leaves [-1, 1]");
    }
    return v;
}

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 std::span<const double> breaks, const QuadratureSpec& quad)
{
    validate(quad);
    if (!(hi >= lo)) {
        throw Error(ErrorCode::kDomain, "integration limits must satisfy lo <= hi");
    }
    std::vector<double> cuts{lo};
    for (double b : breaks) {
        if (b > lo && b < hi) {
            cuts.push_back(b);
        }
    }
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    int budget = quad.max_subdivisions;
    NeumaierSum sum;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] > cuts[i]) {
            sum.add(integrate_piece(f, cuts[i], cuts[i + 1], quad, budget));
        }
    }
    return sum.value();
}

namespace {

void require_segment(const OperatorClass& op, double a)
{
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw Error(ErrorCode::kDomain, "segment length a must be finite and > 0");
    }
    if (!(a < monotonicity_threshold(op))) {
        std::ostringstream os;
        os.precision(17);
        os << "a = " << a << " is not below delta = " << monotonicity_threshold(op);
        throw Error(ErrorCode::kOutOfRange, os.str());
    }
}

}  // namespace

double solve_bvp(const OperatorClass& op, double a, const ControlFunction& phi, double t,
                 const QuadratureSpec& quad)
{
    require_segment(op, a);
    if (!(t >= 0.0 && t <= a)) {
        throw Error(ErrorCode::kDomain, "solve_bvp: t must lie in [0, a]");
    }
    // g((tau - t)_+) vanishes below t.
    const auto integrand = [&](double tau) { return green_kernel(op, tau - t) * phi(tau); };
    return integrate(integrand, t, a, phi.jumps(), quad);
}

namespace {

// Zeros of r(tau) = g(tau) - c g'(tau) on (0, a), located by scanning and bisection.
std::vector<double> residual_zeros(const OperatorClass& op, double a, double c)
{
    const auto r = [&](double tau) {
        return green_kernel(op, tau) - c * green_kernel_derivative(op, tau);
    };
    constexpr int kScan = 64;
    std::vector<double> zeros;
    double x0 = 0.0;
    double r0 = r(x0);
    for (int i = 1; i <= kScan; ++i) {
        const double x1 = a * i / kScan;
        const double r1 = r(x1);
        if (r0 == 0.0 && x0 > 0.0) {
            zeros.push_back(x0);
        } else if ((r0 < 0.0 && r1 > 0.0) || (r0 > 0.0 && r1 < 0.0)) {
            double lo = x0;
            double hi = x1;
            const bool rising = r0 < 0.0;
            for (int it = 0; it < 200 && hi - lo > 1e-16 * a; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double rm = r(mid);
                if (rm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                ((rm < 0.0) == rising ? lo : hi) = mid;
            }
            zeros.push_back(0.5 * (lo + hi));
        }
        x0 = x1;
        r0 = r1;
    }
    return zeros;
}

double l1_objective(const OperatorClass& op, double a, double c, const QuadratureSpec& quad)
{
    const std::vector<double> zeros = residual_zeros(op, a, c);
    const auto integrand = [&](double tau) {
        return std::abs(green_kernel(op, tau) - c * green_kernel_derivative(op, tau));
    };
    return integrate(integrand, 0.0, a, zeros, quad);
}

}  // namespace

L1Approximation l1_best_approx(const OperatorClass& op, double a, const QuadratureSpec& quad)
{
    require_segment(op, a);
    validate(quad);
    const auto F = [&](double c) { return l1_objective(op, a, c, quad); };

    // F is convex in c; grow [lo, hi] until the interior midpoint beats both ends.
    double lo = 0.0;
    double hi = 2.0 * green_kernel(op, a) / green_kernel_derivative(op, a);
    int doublings = 0;
    for (;;) {
        const double mid = 0.5 * (lo + hi);
        const double fm = F(mid);
        const bool grow_hi = F(hi) <= fm;
        const bool grow_lo = F(lo) <= fm;
        if (!grow_hi && !grow_lo) {
            break;
        }
        if (++doublings > 50) {
            throw Error(ErrorCode::kOracleFailure, "L1 bracket did not close within 50 doublings");
        }
        const double width = hi - lo;
        if (grow_hi) {
            hi += width;
        }
        if (grow_lo) {
            lo -= width;
        }
    }

    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = F(x1);
    double f2 = F(x2);
    while (hi - lo > 1e-12 * std::max(1.0, std::abs(x1))) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = F(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = F(x2);
        }
    }
    return f1 <= f2 ? L1Approximation{x1, f1} : L1Approximation{x2, f2};
}

bool sign_pattern_check(const OperatorClass& op, double a, double c0)
{
    const double t0 = t_zero(op, a);
    constexpr int kGrid = 10000;
    for (int i = 0; i < kGrid; ++i) {
        const double tau = a * i / (kGrid - 1);
        if (std::abs(tau - t0) <= 1e-6 * a) {
            continue;
        }
        const double r = green_kernel(op, tau) - c0 * green_kernel_derivative(op, tau);
        const double expected = tau > t0 ? 1.0 : -1.0;
        if (!(r * expected > 0.0)) {
            return false;
        }
    }
    return true;
}

MembershipResult class_membership_check(const OperatorClass& op, const SampledFunction& h)
{
    const std::size_t n = h.values.size();
    if (!(h.step > 0.0) || n < 101) {
        throw Error(ErrorCode::kPrecondition,
                    "class_membership_check needs step > 0 and step <= a/100 (at least 101 samples)");
    }
    const OperatorSpec c = op.coefficients();
    const double s = h.step;
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double t = s * static_cast<double>(i);
        const bool near_kink = std::any_of(h.kinks.begin(), h.kinks.end(), [&](double k) {
            return std::abs(t - k) < s * (1.0 - 1e-9);
        });
        if (near_kink) {
            continue;
        }
        const double d2 = (h.values[i + 1] - 2.0 * h.values[i] + h.values[i - 1]) / (s * s);
        const double d1 = (h.values[i + 1] - h.values[i - 1]) / (2.0 * s);
        worst = std::max(worst, std::abs(d2 + c.p * d1 + c.q * h.values[i]));
    }
    return {worst, worst <= 1.0 + 1e-6 + 10.0 * s * s};
}

SampledFunction sample_extremal(const ExtremalProfile& profile, int intervals)
{
    if (intervals < 100) {
        throw Error(ErrorCode::kPrecondition, "sample_extremal needs at least 100 intervals");
    }
    SampledFunction out;
    out.step = profile.a / intervals;
    out.kinks = {profile.t0, profile.a};
    out.values.reserve(static_cast<std::size_t>(intervals) + 1);
    for (int i = 0; i <= intervals; ++i) {
        out.values.push_back(profile.h_tilde(std::min(profile.a, out.step * i)));
    }
    return out;
}

}  // namespace isorec
