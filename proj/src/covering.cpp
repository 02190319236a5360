#include "isorec/covering.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <random>

#include "isorec/error.hpp"

namespace isorec {


std::string_view to_string(DensityStatus s) noexcept
{
    return s == DensityStatus::kExact ? "exact" : "best_known_upper";
}

CoveringDensity dens_lookup(int d)
{
    if (d < 1 || d > kMaxDim) {
        throw Error(ErrorCode::kUnsupportedDimension, "no covering density for d=" + std::to_string(d));
    }
    // Thickness of the A_d* lattice covering; optimal for d <= 2, best known for 3 and 4.
    const double n = d;
    const double v = unit_ball_volume(d) * std::sqrt(n + 1) * std::pow(n * (n + 2) / (12 * (n + 1)), n / 2);
    if (d == 1) {
        return {1.0, DensityStatus::kExact};
    }
    return {v, d == 2 ? DensityStatus::kExact : DensityStatus::kBestKnownUpper};
}

double en_asymptotic(const ConvexBody& body, int n)
{
    if (n < 1) {
        throw Error(ErrorCode::kInvalidParameter, "n must be positive");
    }
    const int d = body.dim();
    const double dens = dens_lookup(d).value;
    return std::pow(dens * body.volume() / (n * unit_ball_volume(d)), 1.0 / d);
}

std::vector<Point> covering_samples(const ConvexBody& body, double spacing, unsigned long long seed)
{
    if (!(spacing > 0)) {
        throw Error(ErrorCode::kInvalidParameter, "sample spacing must be positive");
    }
    std::vector<Point> s = interior_sample(body, spacing, seed);
    std::vector<Point> b = boundary_sample(body, spacing);
    s.insert(s.end(), b.begin(), b.end());
    for (const Point& c : body.corners()) {
        s.push_back(c);
    }
    return s;
}

namespace {

// Max heap on distance, smaller index first among equals.
struct HeapEntry {
    double dist;
    std::size_t idx;
    bool operator<(const HeapEntry& o) const { return dist < o.dist || (dist == o.dist && idx > o.idx); }
};

void check_fixed(const ConvexBody& body, const NodeSet& fixed)
{
    if (!fixed.empty()) {
        validate(fixed);
        if (fixed.dim != body.dim()) {
            throw Error(ErrorCode::kDimensionMismatch, "fixed nodes and body differ in dimension");
        }
    }
}

}  // namespace

NodeSet greedy_farthest_point(const ConvexBody& body, int n, unsigned long long seed, double spacing,
                              const NodeSet& fixed)
{
    if (n < 1) {
        throw Error(ErrorCode::kInvalidParameter, "n must be positive");
    }
    check_fixed(body, fixed);
    if (fixed.size() > static_cast<std::size_t>(n)) {
        throw Error(ErrorCode::kInvalidParameter, "more fixed nodes than requested");
    }
    const std::vector<Point> samples = covering_samples(body, spacing, seed);
    NodeSet out{body.dim(), fixed.points};
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(samples.size(), inf);
    const KdTree tree(samples);

    if (out.empty()) {
        std::size_t best = 0;
        double depth = -inf;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const double dd = -body.signed_distance(samples[i]);
            if (dd > depth || (dd == depth && samples[i].lex_less(samples[best]))) {
                depth = dd;
                best = i;
            }
        }
        out.points.push_back(samples[best]);
    }
    if (static_cast<std::size_t>(n) == out.size()) {
        return out;
    }
    {
        const KdTree fixed_tree(out.points);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            dist[i] = fixed_tree.nearest(samples[i]).distance;
        }
    }
    std::priority_queue<HeapEntry> heap;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        heap.push({dist[i], i});
    }
    while (out.size() < static_cast<std::size_t>(n)) {
        while (heap.top().dist != dist[heap.top().idx]) {
            heap.pop();
        }
        const HeapEntry top = heap.top();
        heap.pop();
        const Point node = samples[top.idx];
        out.points.push_back(node);
        std::vector<std::size_t> changed;
        tree.for_each_within(node, top.dist, [&](std::size_t i, double d2) {
            const double d = std::sqrt(d2);
            if (d < dist[i]) {
                dist[i] = d;
                changed.push_back(i);
            }
        });
        for (std::size_t i : changed) {
            heap.push({dist[i], i});
        }
    }
    return out;
}

namespace {

// Ball through up to d+1 support points, centre in their affine hull.
bool circumball(const std::vector<Point>& r, Ball& out)
{
    const int d = r.front().dim();
    const std::size_t m = r.size() - 1;
    if (m == 0) {
        out = {r[0], 0.0};
        return true;
    }
    // Solve A lambda = b with A_jk = (r_j - r_0).(r_k - r_0), b_j = |r_j - r_0|^2 / 2.
    double a[kMaxDim + 1][kMaxDim + 2] = {};
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < m; ++k) {
            double s = 0;
            for (int i = 0; i < d; ++i) {
                s += (r[j + 1][i] - r[0][i]) * (r[k + 1][i] - r[0][i]);
            }
            a[j][k] = s;
        }
        a[j][m] = 0.5 * a[j][j];
    }
    double scale = 0;
    for (std::size_t j = 0; j < m; ++j) scale = std::max(scale, a[j][j]);
    for (std::size_t c = 0; c < m; ++c) {
        std::size_t piv = c;
        for (std::size_t j = c + 1; j < m; ++j) {
            if (std::abs(a[j][c]) > std::abs(a[piv][c])) piv = j;
        }
        if (std::abs(a[piv][c]) <= 1e-14 * scale) {
            return false;
        }
        std::swap(a[c], a[piv]);
        for (std::size_t j = 0; j < m; ++j) {
            if (j == c) continue;
            const double f = a[j][c] / a[c][c];
            for (std::size_t k = c; k <= m; ++k) a[j][k] -= f * a[c][k];
        }
    }
    Point c = r[0];
    for (std::size_t j = 0; j < m; ++j) {
        const double lam = a[j][m] / a[j][j];
        for (int i = 0; i < d; ++i) c[i] += lam * (r[j + 1][i] - r[0][i]);
    }
    out = {c, distance(c, r[0])};
    return true;
}

bool inside(const Ball& b, const Point& p)
{
    return distance(b.center, p) <= b.radius * (1 + 1e-12) + 1e-15;
}

Ball welzl(std::vector<Point>& pts, std::size_t n, std::vector<Point>& support)
{
    Ball b{pts.front(), -1.0};
    if (!support.empty() && !circumball(support, b)) {
        b.radius = -1.0;
    }
    if (static_cast<int>(support.size()) == pts.front().dim() + 1) {
        return b;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (b.radius >= 0 && inside(b, pts[i])) {
            continue;
        }
        support.push_back(pts[i]);
        b = welzl(pts, i, support);
        support.pop_back();
        // Move-to-front keeps the recursion shallow in practice.
        std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(i), pts.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    }
    return b;
}

}  // namespace

Ball smallest_enclosing_ball(std::span<const Point> points)
{
    if (points.empty()) {
        throw Error(ErrorCode::kEmptyNodeSet, "smallest enclosing ball of nothing");
    }
    std::vector<Point> pts(points.begin(), points.end());
    // Grid-ordered input is the worst case for move-to-front; a fixed shuffle avoids it.
    std::mt19937_64 rng(0x5eb);
    for (std::size_t i = pts.size(); i > 1; --i) {
        std::swap(pts[i - 1], pts[static_cast<std::size_t>(rng() % i)]);
    }
    std::vector<Point> support;
    Ball b = welzl(pts, pts.size(), support);
    if (b.radius < 0) {
        b = {pts.front(), 0.0};
    }
    return b;
}

namespace {

struct Assignment {
    std::vector<std::size_t> owner;
    std::vector<double> radius;  // per node
    double max_radius = 0.0;
    double mean_radius = 0.0;
};

Assignment assign(const std::vector<Point>& samples, const std::vector<Point>& nodes)
{
    const KdTree tree(nodes);
    Assignment a;
    a.owner.resize(samples.size());
    a.radius.assign(nodes.size(), 0.0);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const KdTree::Hit h = tree.nearest(samples[i]);
        a.owner[i] = h.index;
        a.radius[h.index] = std::max(a.radius[h.index], h.distance);
    }
    for (double r : a.radius) {
        a.max_radius = std::max(a.max_radius, r);
        a.mean_radius += r;
    }
    a.mean_radius /= static_cast<double>(nodes.size());
    return a;
}

}  // namespace

NodeSet lloyd_refine(const ConvexBody& body, const NodeSet& xi, int iterations, double spacing,
                     std::size_t num_fixed, unsigned long long seed)
{
    if (xi.empty()) {
        throw Error(ErrorCode::kEmptyNodeSet, "lloyd_refine needs nodes");
    }
    validate(xi);
    if (xi.dim != body.dim()) {
        throw Error(ErrorCode::kDimensionMismatch, "nodes and body differ in dimension");
    }
    if (iterations < 1) {
        throw Error(ErrorCode::kInvalidParameter, "iterations must be positive");
    }
    const std::vector<Point> samples = covering_samples(body, spacing, seed);
    std::vector<Point> cur_pts = xi.points;
    Assignment cur = assign(samples, cur_pts);
    std::vector<Point> best = cur_pts;
    double best_max = cur.max_radius;
    int stale = 0;
    for (int it = 0; it < iterations && stale < 10; ++it) {
        // Bucket samples by owner (counting sort) and move each free node.
        std::vector<std::size_t> start(cur_pts.size() + 1, 0);
        for (std::size_t o : cur.owner) ++start[o + 1];
        for (std::size_t j = 0; j < cur_pts.size(); ++j) start[j + 1] += start[j];
        std::vector<Point> bucket(samples.size());
        std::vector<std::size_t> fill(start.begin(), start.end() - 1);
        for (std::size_t i = 0; i < samples.size(); ++i) bucket[fill[cur.owner[i]]++] = samples[i];
        for (std::size_t j = num_fixed; j < cur_pts.size(); ++j) {
            if (start[j + 1] > start[j]) {
                const std::span<const Point> g(bucket.data() + start[j], start[j + 1] - start[j]);
                cur_pts[j] = body.project(smallest_enclosing_ball(g).center);
            }
        }
        cur = assign(samples, cur_pts);
        const bool better = cur.max_radius < best_max * (1 - 1e-6);
        if (cur.max_radius <= best_max) {
            best = cur_pts;
            best_max = cur.max_radius;
        }
        stale = better ? 0 : stale + 1;
    }
    return {xi.dim, std::move(best)};
}

NodeSet maximal_separated_set(std::span<const Point> candidates, double epsilon)
{
    if (!(epsilon > 0)) {
        throw Error(ErrorCode::kInvalidParameter, "epsilon must be positive");
    }
    NodeSet out;
    if (candidates.empty()) {
        return out;
    }
    out.dim = candidates.front().dim();
    const double e2 = epsilon * epsilon;
    for (const Point& c : candidates) {
        if (c.dim() != out.dim) {
            throw Error(ErrorCode::kDimensionMismatch, "candidates differ in dimension");
        }
        const bool separated = std::none_of(out.points.begin(), out.points.end(),
                                            [&](const Point& p) { return distance_squared(p, c) <= e2; });
        if (separated) {
            out.points.push_back(c);
        }
    }
    return out;
}

namespace {

constexpr int kLatticeTrials = 8;

// Points of the A_d* lattice (d <= 3) with covering radius rho, shifted by
// `offset` (in lattice coordinates), that fall in the bounding box of `box`.
std::vector<Point> lattice_points(const Box& box, int d, double rho, const std::array<double, 3>& offset)
{
    std::vector<Point> out;
    if (d == 1) {
        const double step = 2 * rho;
        const long lo = static_cast<long>(std::floor(box.lo[0] / step)) - 1;
        const long hi = static_cast<long>(std::ceil(box.hi[0] / step)) + 1;
        for (long i = lo; i <= hi; ++i) {
            out.push_back(Point{(static_cast<double>(i) + offset[0]) * step});
        }
    } else if (d == 2) {
        // Triangular lattice: rows 1.5 rho apart, sqrt(3) rho spacing, alternate rows shifted.
        const double dx = std::sqrt(3.0) * rho;
        const double dy = 1.5 * rho;
        const long j0 = static_cast<long>(std::floor(box.lo[1] / dy)) - 2;
        const long j1 = static_cast<long>(std::ceil(box.hi[1] / dy)) + 2;
        const long i0 = static_cast<long>(std::floor(box.lo[0] / dx)) - 2;
        const long i1 = static_cast<long>(std::ceil(box.hi[0] / dx)) + 2;
        for (long j = j0; j <= j1; ++j) {
            const double y = (static_cast<double>(j) + offset[1]) * dy;
            const double shift = (j % 2 == 0 ? 0.0 : 0.5) + offset[0];
            for (long i = i0; i <= i1; ++i) {
                out.push_back(Point{(static_cast<double>(i) + shift) * dx, y});
            }
        }
    } else {
        // Body-centred cubic with cube side 4 rho / sqrt(5).
        const double c = 4 * rho / std::sqrt(5.0);
        long lo[3];
        long hi[3];
        for (int a = 0; a < 3; ++a) {
            lo[a] = static_cast<long>(std::floor(box.lo[a] / c)) - 1;
            hi[a] = static_cast<long>(std::ceil(box.hi[a] / c)) + 1;
        }
        for (long i = lo[0]; i <= hi[0]; ++i)
            for (long j = lo[1]; j <= hi[1]; ++j)
                for (long k = lo[2]; k <= hi[2]; ++k)
                    for (double h : {0.0, 0.5}) {
                        out.push_back(Point{(static_cast<double>(i) + h + offset[0]) * c,
                                            (static_cast<double>(j) + h + offset[1]) * c,
                                            (static_cast<double>(k) + h + offset[2]) * c});
                    }
    }
    return out;
}

}  // namespace

NodeSet lattice_seed(const ConvexBody& body, int m, unsigned long long seed, double layer_reach)
{
    const int d = body.dim();
    if (d > 3) {
        throw Error(ErrorCode::kUnsupportedDimension, "lattice seeding supports d <= 3");
    }
    if (m < 0 || layer_reach < 0) {
        throw Error(ErrorCode::kInvalidParameter, "negative node count or layer reach");
    }
    NodeSet out{d, {}};
    if (m == 0) {
        return out;
    }
    std::mt19937_64 rng(seed);
    const Box bb = body.bounding_box();
    auto select = [&](double rho, const std::array<double, 3>& offset) {
        std::vector<Point> pts;
        // A boundary layer of reach r covers depth sqrt(rho^2 - r^2) on its own.
        const double depth = layer_reach > 0 && rho > layer_reach
                                 ? std::sqrt(rho * rho - layer_reach * layer_reach)
                                 : 0.0;
        const std::optional<ConvexBody> core = body.eroded(depth);
        if (!core) {
            return pts;
        }
        for (const Point& raw : lattice_points(bb, d, rho, offset)) {
            // Points outside the core but within rho of it own part of it; the
            // projection onto a convex set is non-expansive, so this keeps the core
            // covered at radius rho.
            if (core->signed_distance(raw) >= rho) continue;
            pts.push_back(core->project(raw));
        }
        return pts;
    };
    double diam = 0;
    for (int i = 0; i < d; ++i) diam += (bb.hi[i] - bb.lo[i]) * (bb.hi[i] - bb.lo[i]);
    diam = std::sqrt(diam);
    // For each trial offset, the smallest rho whose selection fits in m points.
    double best_rho = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < kLatticeTrials; ++trial) {
        std::array<double, 3> offset{};
        for (double& o : offset) {
            o = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        }
        // m balls of radius rho cannot cover the body below the volume bound.
        const double vol_bound = std::pow(body.volume() / (m * unit_ball_volume(d)), 1.0 / d);
        double lo = std::max(layer_reach, 0.5 * vol_bound);
        double hi = diam;
        for (int it = 0; it < 50; ++it) {
            const double mid = std::sqrt(lo * hi);
            (select(mid, offset).size() <= static_cast<std::size_t>(m) ? hi : lo) = mid;
        }
        if (hi < best_rho) {
            best_rho = hi;
            out.points = select(hi, offset);
        }
    }
    return out;
}

NodeSet approximate_centers(const ConvexBody& body, int n, unsigned long long seed, double spacing,
                            const NodeSet& fixed)
{
    NodeSet start = fixed;
    start.dim = body.dim();
    if (body.dim() <= 3 && fixed.size() < static_cast<std::size_t>(n)) {
        double reach = 0.0;
        if (!fixed.empty()) {
            reach = one_sided_hausdorff(body, Region::kBoundary, fixed, spacing / 2).upper();
        }
        const NodeSet lat = lattice_seed(body, n - static_cast<int>(fixed.size()), seed, reach);
        start.points.insert(start.points.end(), lat.points.begin(), lat.points.end());
    }
    const NodeSet g = start.size() < static_cast<std::size_t>(n) || start.empty()
                          ? greedy_farthest_point(body, n, seed, spacing, start)
                          : start;
    // Coarse relaxation first, then a short polish on the fine samples.
    const NodeSet coarse = lloyd_refine(body, g, 200, 4 * spacing, fixed.size(), seed);
    const NodeSet l = lloyd_refine(body, coarse, 30, spacing, fixed.size(), seed);
    // Relaxation scores on samples only; keep it only if the certified radius agrees.
    const double eg = one_sided_hausdorff(body, Region::kInterior, g, spacing / 2).upper();
    const double el = one_sided_hausdorff(body, Region::kInterior, l, spacing / 2).upper();
    return el < eg ? l : g;
}

double auto_resolution(const ConvexBody& body, int n)
{
    return en_asymptotic(body, n) / (body.dim() <= 2 ? 25.0 : 8.0);
}

NodeGenReport build_xi_star(const ConvexBody& body, int n, double theta, unsigned long long seed,
                            double resolution)
{
    if (!(theta > 0 && theta < std::numbers::sqrt2 / 2)) {
        throw Error(ErrorCode::kInvalidParameter, "theta must lie in (0, 1/sqrt 2)");
    }
    if (n < 1) {
        throw Error(ErrorCode::kInvalidParameter, "n must be positive");
    }
    if (!(resolution > 0)) {
        throw Error(ErrorCode::kInvalidParameter, "resolution must be positive");
    }
    const int d = body.dim();
    // Relaxation quality depends on how finely it samples; cap the cost near 1e6 samples.
    const double spacing = std::max(resolution / 2, std::pow(body.volume() / 1e6, 1.0 / d));

    const NodeSet prelim = approximate_centers(body, n, seed, spacing);
    const double h = one_sided_hausdorff(body, Region::kInterior, prelim, resolution).value;

    // Candidate grid on the boundary whose own covering radius is just under
    // theta h and whose spacing exceeds theta h, so the scan keeps all of it.
    NodeSet z;
    if (d == 1) {
        z = maximal_separated_set(body.corners(), theta * h);
    } else {
        const double disp = 2 * theta * h * (1 - 1e-3) / std::sqrt(d - 1.0);
        const std::vector<Point> cand = boundary_sample(body, disp);
        z = maximal_separated_set(cand, theta * h);
    }
    z.dim = d;
    if (z.size() >= static_cast<std::size_t>(n)) {
        throw Error(ErrorCode::kNTooSmall, "boundary layer needs " + std::to_string(z.size()) +
                                               " nodes, n=" + std::to_string(n));
    }

    NodeGenReport r;
    r.nodes = approximate_centers(body, n, seed, spacing, z);
    r.k_n = z.size();
    r.theta = theta;
    r.seed = seed;
    r.resolution = resolution;
    r.h = h;
    const KdTree index(r.nodes.points);
    r.e_omega = one_sided_hausdorff(body, Region::kInterior, index, resolution);
    r.e_boundary = one_sided_hausdorff(body, Region::kBoundary, index, resolution);
    r.boundary_layer_ok = r.e_boundary.upper() <= theta * r.e_omega.value;
    return r;
}

}  // namespace isorec
