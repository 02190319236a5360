#pragma once

// Brute-force numerical counterparts of the closed-form extremal values in
// operators.hpp. Nothing here calls G, ext1 or ext2; only g and g' are shared.

#include <functional>
#include <span>
#include <vector>

#include "isorec/operators.hpp"

namespace isorec {

struct QuadratureSpec {
    double abs_tol = 1e-14;
    double rel_tol = 1e-13;
    int max_subdivisions = 4096;
};

void validate(const QuadratureSpec& quad);

/// Right-hand side phi on [0, a] with |phi| <= 1 and known jump points.
class ControlFunction {
public:
    ControlFunction(std::function<double(double)> rule, std::vector<double> jumps);

    static ControlFunction constant(double c);
    /// sign(tau - t0), with the value +1 at tau = t0.
    static ControlFunction sign_switch(double t0);

    /// Throws precondition if the rule leaves [-1, 1].
    double operator()(double tau) const;
    const std::vector<double>& jumps() const noexcept { return jumps_; }

private:
    std::function<double(double)> rule_;
    std::vector<double> jumps_;
};

/// Integral of f over [lo, hi], adaptive Gauss-Kronrod on each piece between
/// sorted `breaks` (those outside (lo, hi) are ignored).
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 std::span<const double> breaks, const QuadratureSpec& quad);

/// f(t) = integral_0^a g((tau - t)_+) phi(tau) dtau.
double solve_bvp(const OperatorClass& op, double a, const ControlFunction& phi, double t,
                 const QuadratureSpec& quad = {});

struct L1Approximation {
    double c0;
    double value;
};

/// min over c of integral_0^a |g(tau) - c g'(tau)| dtau by golden-section search.
L1Approximation l1_best_approx(const OperatorClass& op, double a, const QuadratureSpec& quad = {});

/// sign(g - c0 g') == sign(tau - t0) on a 10^4-point grid, skipping |tau - t0| <= 1e-6 a.
bool sign_pattern_check(const OperatorClass& op, double a, double c0);

/// Samples h(i * step), i = 0..values.size()-1, with kinks where h'' may jump.
struct SampledFunction {
    double step = 0.0;
    std::vector<double> values;
    std::vector<double> kinks;
};

struct MembershipResult {
    double max_residual;
    bool ok;
};

/// max |h'' + p h' + q h| by central differences away from the kinks;
/// ok iff it stays below 1 + 1e-6 + 10 step^2.
MembershipResult class_membership_check(const OperatorClass& op, const SampledFunction& h);

/// Samples the extremal function on [0, a] with `intervals` steps, kinks at t0 and a.
SampledFunction sample_extremal(const ExtremalProfile& profile, int intervals);

}  // namespace isorec
