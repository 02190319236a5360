#pragma once

#include <optional>
#include <vector>

#include "isorec/covering.hpp"
#include "isorec/geometry.hpp"
#include "isorec/operators.hpp"

namespace isorec {

/// Which form of the upper bound to report. kHalved multiplies it by 1/2; it is
/// kept only to show that the halved form undercuts the fooling lower bound.
enum class UpperBoundForm { kRadius, kHalved };

struct ErrorReport {
    DistanceEstimate e_omega;
    DistanceEstimate e_boundary;
    double upper = 0.0;
    std::optional<double> lower;
    bool exact = false;
    /// ext1(e_boundary) <= ext2(e_omega), with e_boundary at value + gap and e_omega at value.
    bool boundary_condition_ok = false;
    /// delta - e_omega.value (infinite when the kernel is monotone everywhere).
    double delta_margin = 0.0;
    UpperBoundForm form = UpperBoundForm::kRadius;
};

/// Radial bump h~(|x - z|) built from the extremal profile; p = 0 operators only.
class FoolingFunction {
public:
    FoolingFunction(const OperatorClass& op, Point center, double radius);

    const Point& center() const noexcept { return center_; }
    double radius() const noexcept { return profile_.a; }
    const OperatorClass& op() const noexcept { return profile_.op; }
    const ExtremalProfile& profile() const noexcept { return profile_; }

private:
    Point center_;
    ExtremalProfile profile_;
};

double fooling_eval(const FoolingFunction& f, const Point& x);
/// Zero at the centre and outside the support.
Point fooling_grad(const FoolingFunction& f, const Point& x);

struct FoolingBound {
    double lower;
    FoolingFunction witness;
};

ErrorReport upper_bound(const OperatorClass& op, const ConvexBody& body, const NodeSet& xi, double resolution,
                        UpperBoundForm form = UpperBoundForm::kRadius);

/// Bump centred at the farthest point from the nodes. Throws unsupported-operator for p != 0.
FoolingBound lower_bound_fooling(const OperatorClass& op, const ConvexBody& body, const NodeSet& xi,
                                 double resolution);

/// Upper and fooling lower bound together. `exact` holds when the boundary
/// condition is met and the two agree up to what the distance gaps explain.
ErrorReport exact_error(const OperatorClass& op, const ConvexBody& body, const NodeSet& xi, double resolution,
                        UpperBoundForm form = UpperBoundForm::kRadius);

/// Same as upper_bound / exact_error from already certified distances
/// (p != 0 gives the upper bound only).
ErrorReport error_from_estimates(const OperatorClass& op, const NodeSet& xi, const DistanceEstimate& e_omega,
                                 const DistanceEstimate& e_boundary,
                                 UpperBoundForm form = UpperBoundForm::kRadius);

struct FoolingCheck {
    double max_residual = 0.0;
    bool ok = false;
    /// Largest lambda^2 |P(d/dt) h~| + (1 - lambda^2) |q h~| seen.
    double max_decomposition_bound = 0.0;
    /// Largest mu^2 |q h~ + h~'/r|: the directional term of the exact second derivative.
    double max_tangential_term = 0.0;
    double abs_q_h0 = 0.0;
    std::size_t samples = 0;
    Point worst_point;
    Point worst_direction;
};

/// Central second differences of f along random directions at random points of
/// the support, staying 1e-4 a away from the radii 0, t0 and a.
FoolingCheck verify_fooling_class(const FoolingFunction& f, int n_points, int n_dirs, double step,
                                  unsigned long long seed);

struct AsymptoticRn {
    int d = 0;
    int n = 0;
    double value = 0.0;
    DensityStatus dens_status = DensityStatus::kExact;
};

/// (1/4) (dens(d) vol / (nu_d n))^{2/d}.
AsymptoticRn rn_asymptotic(const ConvexBody& body, int n);

struct StudyRow {
    int n = 0;
    std::size_t k_n = 0;
    ErrorReport report;
    /// upper * n^{2/d}.
    double normalized = 0.0;
    bool boundary_layer_ok = false;
};

/// One row per n: build near-optimal nodes and bound the error on them.
/// A non-positive resolution selects auto_resolution per n.
std::vector<StudyRow> convergence_study(const OperatorClass& op, const ConvexBody& body,
                                        const std::vector<int>& n_list, double theta, unsigned long long seed,
                                        double resolution);

}  // namespace isorec
