#include "isorec/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "isorec/error.hpp"

namespace isorec {

namespace {

void require_self_adjoint(const OperatorClass& op, const char* what)
{
    if (!op.is_self_adjoint()) {
        throw Error(ErrorCode::kUnsupportedOperator,
                    std::string(what) + " needs p = 0; got " + op.describe());
    }
}

void require_nodes(const ConvexBody& body, const NodeSet& xi)
{
    if (xi.empty()) {
        throw Error(ErrorCode::kEmptyNodeSet, "node set is empty");
    }
    validate(xi);
    if (xi.dim != body.dim()) {
        throw Error(ErrorCode::kDimensionMismatch, "nodes and body differ in dimension");
    }
}

double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double normal(std::mt19937_64& rng)
{
    // Box-Muller; 1 - u keeps the log finite.
    const double u = 1.0 - uniform01(rng);
    const double v = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

Point random_direction(std::mt19937_64& rng, int d)
{
    Point u(d);
    double norm = 0;
    do {
        norm = 0;
        for (int i = 0; i < d; ++i) {
            u[i] = normal(rng);
            norm += u[i] * u[i];
        }
    } while (norm < 1e-24);
    norm = std::sqrt(norm);
    for (int i = 0; i < d; ++i) u[i] /= norm;
    return u;
}

}  // namespace

FoolingFunction::FoolingFunction(const OperatorClass& op, Point center, double radius)
    : center_(center), profile_((require_self_adjoint(op, "fooling function"), extremal_profile(op, radius)))
{
}

double fooling_eval(const FoolingFunction& f, const Point& x)
{
    if (x.dim() != f.center().dim()) {
        throw Error(ErrorCode::kDimensionMismatch, "point and fooling function differ in dimension");
    }
    const double r = distance(x, f.center());
    return r >= f.radius() ? 0.0 : f.profile().h_tilde(r);
}

Point fooling_grad(const FoolingFunction& f, const Point& x)
{
    if (x.dim() != f.center().dim()) {
        throw Error(ErrorCode::kDimensionMismatch, "point and fooling function differ in dimension");
    }
    Point g(x.dim());
    const double r = distance(x, f.center());
    if (r == 0.0 || r >= f.radius()) {
        return g;
    }
    const double s = f.profile().h_tilde_derivative(r) / r;
    for (int i = 0; i < x.dim(); ++i) g[i] = s * (x[i] - f.center()[i]);
    return g;
}

ErrorReport error_from_estimates(const OperatorClass& op, const NodeSet& xi, const DistanceEstimate& e_omega,
                                 const DistanceEstimate& e_boundary, UpperBoundForm form)
{
    const double delta = monotonicity_threshold(op);
    if (!(e_omega.upper() < delta)) {
        throw Error(ErrorCode::kOutOfRange, "covering radius " + std::to_string(e_omega.upper()) +
                                                " is not below delta = " + std::to_string(delta));
    }
    ErrorReport r;
    r.e_omega = e_omega;
    r.e_boundary = e_boundary;
    r.form = form;
    r.delta_margin = delta - e_omega.value;
    const double interior_hi = ext2(op, e_omega.upper());
    const double boundary_hi = ext1(op, std::min(e_boundary.upper(), e_omega.upper()));
    r.boundary_condition_ok = boundary_hi <= ext2(op, e_omega.value);
    r.upper = std::max(interior_hi, boundary_hi);
    if (form == UpperBoundForm::kHalved) {
        r.upper *= 0.5;
    }
    if (op.is_self_adjoint()) {
        const double a = dist_point_to_nodes(e_omega.argmax, xi);
        r.lower = ext2(op, a);
        const double explained = interior_hi - ext2(op, e_omega.value);
        const double spread = r.upper - *r.lower;
        r.exact = r.boundary_condition_ok && spread >= -1e-12 * r.upper &&
                  spread <= explained * (1 + 1e-9) + 1e-15 * r.upper;
    }
    return r;
}

ErrorReport upper_bound(const OperatorClass& op, const ConvexBody& body, const NodeSet& xi, double resolution,
                        UpperBoundForm form)
{
    require_nodes(body, xi);
    const KdTree index(xi.points);
    const DistanceEstimate eo = one_sided_hausdorff(body, Region::kInterior, index, resolution);
    const DistanceEstimate eb = one_sided_hausdorff(body, Region::kBoundary, index, resolution);
    ErrorReport r = error_from_estimates(op, xi, eo, eb, form);
    r.lower.reset();
    r.exact = false;
    return r;
}

FoolingBound lower_bound_fooling(const OperatorClass& op, const ConvexBody& body, const NodeSet& xi,
                                 double resolution)
{
    require_self_adjoint(op, "lower_bound_fooling");
    require_nodes(body, xi);
    const DistanceEstimate eo = one_sided_hausdorff(body, Region::kInterior, xi, resolution);
    const double a = dist_point_to_nodes(eo.argmax, xi);
    if (!(a < monotonicity_threshold(op))) {
        throw Error(ErrorCode::kOutOfRange, "covering radius is not below delta");
    }
    FoolingFunction f(op, eo.argmax, a);
    return {f.profile().ext2, f};
}

ErrorReport exact_error(const OperatorClass& op, const ConvexBody& body, const NodeSet& xi, double resolution,
                        UpperBoundForm form)
{
    require_self_adjoint(op, "exact_error");
    require_nodes(body, xi);
    const KdTree index(xi.points);
    const DistanceEstimate eo = one_sided_hausdorff(body, Region::kInterior, index, resolution);
    const DistanceEstimate eb = one_sided_hausdorff(body, Region::kBoundary, index, resolution);
    return error_from_estimates(op, xi, eo, eb, form);
}

FoolingCheck verify_fooling_class(const FoolingFunction& f, int n_points, int n_dirs, double step,
                                  unsigned long long seed)
{
    const double a = f.radius();
    if (n_points < 1 || n_dirs < 1) {
        throw Error(ErrorCode::kInvalidParameter, "need at least one point and one direction");
    }
    if (!(step > 0 && step <= a / 100)) {
        throw Error(ErrorCode::kInvalidParameter, "step must lie in (0, a/100]");
    }
    const ExtremalProfile& pr = f.profile();
    const double q = pr.op.coefficients().q;
    const int d = f.center().dim();
    const double guard = 1e-4 * a;
    std::mt19937_64 rng(seed);

    FoolingCheck out;
    out.abs_q_h0 = std::abs(q * pr.ext2);
    for (int i = 0; i < n_points; ++i) {
        Point x;
        double r = 0;
        do {
            const Point dir = random_direction(rng, d);
            r = a * std::pow(uniform01(rng), 1.0 / d);
            x = f.center();
            for (int k = 0; k < d; ++k) x[k] += r * dir[k];
        } while (r < guard || std::abs(r - pr.t0) < guard || a - r < guard);

        const double fx = fooling_eval(f, x);
        Point radial(d);
        for (int k = 0; k < d; ++k) radial[k] = (x[k] - f.center()[k]) / r;
        const double h = pr.h_tilde(r);
        const double hp = pr.h_tilde_derivative(r);
        const double hpp = pr.h_tilde_second_derivative(r);

        for (int j = 0; j < n_dirs; ++j) {
            const Point u = random_direction(rng, d);
            Point xp = x;
            Point xm = x;
            double lambda = 0;
            for (int k = 0; k < d; ++k) {
                xp[k] += step * u[k];
                xm[k] -= step * u[k];
                lambda += u[k] * radial[k];
            }
            const double second = (fooling_eval(f, xp) - 2 * fx + fooling_eval(f, xm)) / (step * step);
            const double residual = std::abs(second + q * fx);
            const double l2 = lambda * lambda;
            out.max_decomposition_bound =
                std::max(out.max_decomposition_bound, l2 * std::abs(hpp + q * h) + (1 - l2) * std::abs(q * h));
            out.max_tangential_term = std::max(out.max_tangential_term, (1 - l2) * std::abs(q * h + hp / r));
            if (residual > out.max_residual) {
                out.max_residual = residual;
                out.worst_point = x;
                out.worst_direction = u;
            }
            ++out.samples;
        }
    }
    out.ok = out.max_residual <= 1 + 1e-4 + 10 * step * step;
    return out;
}

AsymptoticRn rn_asymptotic(const ConvexBody& body, int n)
{
    const double e = en_asymptotic(body, n);
    return {body.dim(), n, 0.25 * e * e, dens_lookup(body.dim()).status};
}

std::vector<StudyRow> convergence_study(const OperatorClass& op, const ConvexBody& body,
                                        const std::vector<int>& n_list, double theta, unsigned long long seed,
                                        double resolution)
{
    std::vector<StudyRow> rows;
    for (int n : n_list) {
        const double res = resolution > 0 ? resolution : auto_resolution(body, n);
        const NodeGenReport g = build_xi_star(body, n, theta, seed, res);
        StudyRow row;
        row.n = n;
        row.k_n = g.k_n;
        row.boundary_layer_ok = g.boundary_layer_ok;
        row.report = error_from_estimates(op, g.nodes, g.e_omega, g.e_boundary);
        row.normalized = row.report.upper * std::pow(static_cast<double>(n), 2.0 / body.dim());
        rows.push_back(row);
    }
    return rows;
}

}  // namespace isorec
