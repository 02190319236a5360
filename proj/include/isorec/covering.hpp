#pragma once

#include <span>
#include <string_view>

#include "isorec/geometry.hpp"

namespace isorec {

/// Boundary-layer separation factor; must lie in (0, 1/sqrt 2).
inline constexpr double kDefaultTheta = 0.68;

enum class DensityStatus { kExact, kBestKnownUpper };

std::string_view to_string(DensityStatus s) noexcept;

/// Least density of a covering of R^d by equal balls.
struct CoveringDensity {
    double value;
    DensityStatus status;
};

/// d = 1, 2 exact; d = 3 (body-centred cubic) and d = 4 (A4*) best known.
CoveringDensity dens_lookup(int d);

/// Leading term (dens(d) vol(body) / (n nu_d))^{1/d} of the n-covering radius.
double en_asymptotic(const ConvexBody& body, int n);

/// Interior grid, boundary samples and corners: what covering moves are scored on.
std::vector<Point> covering_samples(const ConvexBody& body, double spacing, unsigned long long seed);

/// Farthest-point insertion over covering_samples(body, spacing, seed). With an
/// empty `fixed` set the first node is the deepest sample; otherwise the fixed
/// nodes come first in the result and only n - fixed.size() are added.
NodeSet greedy_farthest_point(const ConvexBody& body, int n, unsigned long long seed, double spacing,
                              const NodeSet& fixed = {});

/// Minimax relaxation: each free node moves to the centre of the smallest ball
/// enclosing the samples it is nearest to. The first `num_fixed` nodes stay put.
/// A step is kept only if the sampled covering radius does not grow.
NodeSet lloyd_refine(const ConvexBody& body, const NodeSet& xi, int iterations, double spacing,
                     std::size_t num_fixed = 0, unsigned long long seed = 0);

/// Greedy scan: keep a candidate iff it is farther than epsilon from all kept ones.
NodeSet maximal_separated_set(std::span<const Point> candidates, double epsilon);

/// Up to m points of a covering lattice (hexagonal for d = 2, body-centred
/// cubic for d = 3) at the finest scale rho the count allows. When a boundary
/// layer covers the boundary within `layer_reach`, only the core eroded by
/// sqrt(rho^2 - layer_reach^2) is covered. Offsets are drawn from `seed`.
NodeSet lattice_seed(const ConvexBody& body, int m, unsigned long long seed, double layer_reach = 0.0);

/// Lattice seed (d <= 3), greedy fill, then minimax relaxation.
NodeSet approximate_centers(const ConvexBody& body, int n, unsigned long long seed, double spacing,
                            const NodeSet& fixed = {});

/// Smallest enclosing ball of a non-empty point set (move-to-front Welzl).
Ball smallest_enclosing_ball(std::span<const Point> points);

struct NodeGenReport {
    NodeSet nodes;  // boundary layer first, then interior nodes
    DistanceEstimate e_omega;
    DistanceEstimate e_boundary;
    std::size_t k_n = 0;
    double theta = 0.5;
    unsigned long long seed = 0;
    double resolution = 0.0;
    /// Covering radius of the preliminary n-centres the boundary layer is sized from.
    double h = 0.0;
    /// e(boundary, nodes) + gap <= theta * e(Omega, nodes), checked conservatively.
    bool boundary_layer_ok = false;
};

/// Resolution used when none is given: a fraction of the asymptotic covering radius.
double auto_resolution(const ConvexBody& body, int n);

/// Near-optimal nodes: a boundary layer Z of spacing about 2 theta h plus
/// n - card(Z) relaxed interior centres. Throws n-too-small if card(Z) >= n.
NodeGenReport build_xi_star(const ConvexBody& body, int n, double theta, unsigned long long seed,
                            double resolution);

}  // namespace isorec
