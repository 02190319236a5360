#include "isorec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "isorec/error.hpp"

namespace isorec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dim(int dim)
{
    if (dim < 1 || dim > kMaxDim) {
        throw Error(ErrorCode::kUnsupportedDimension, "dimension must be between 1 and 4");
    }
}

void require_match(const Point& x, int dim)
{
    if (x.dim() != dim) {
        std::ostringstream os;
        os << "point of dimension " << x.dim() << " used with a body of dimension " << dim;
        throw Error(ErrorCode::kDimensionMismatch, os.str());
    }
}

bool all_finite(const Point& p)
{
    for (int i = 0; i < p.dim(); ++i) {
        if (!std::isfinite(p[i])) {
            return false;
        }
    }
    return true;
}

double cross(const Point& o, const Point& a, const Point& b)
{
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

double segment_distance(const Point& x, const Point& a, const Point& b)
{
    const double ex = b[0] - a[0];
    const double ey = b[1] - a[1];
    const double len2 = ex * ex + ey * ey;
    double t = ((x[0] - a[0]) * ex + (x[1] - a[1]) * ey) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(x[0] - (a[0] + t * ex), x[1] - (a[1] + t * ey));
}

// Number of equal pieces needed so that none is longer than h.
double pieces(double len, double h)
{
    return std::max(1.0, std::ceil(len / h - 1e-9));
}

}  // namespace

Point::Point(int dim) : dim_(dim)
{
    require_dim(dim);
}

Point::Point(std::initializer_list<double> coords) : dim_(static_cast<int>(coords.size()))
{
    require_dim(dim_);
    std::copy(coords.begin(), coords.end(), c_.begin());
}

Point Point::from(std::span<const double> coords)
{
    Point p(static_cast<int>(coords.size()));
    std::copy(coords.begin(), coords.end(), p.c_.begin());
    return p;
}

bool Point::operator==(const Point& other) const noexcept
{
    if (dim_ != other.dim_) {
        return false;
    }
    for (int i = 0; i < dim_; ++i) {
        if (c_[static_cast<std::size_t>(i)] != other.c_[static_cast<std::size_t>(i)]) {
            return false;
        }
    }
    return true;
}

bool Point::lex_less(const Point& other) const noexcept
{
    return std::lexicographical_compare(c_.begin(), c_.begin() + dim_, other.c_.begin(),
                                        other.c_.begin() + other.dim_);
}

double distance_squared(const Point& a, const Point& b) noexcept
{
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double distance(const Point& a, const Point& b) noexcept
{
    return std::sqrt(distance_squared(a, b));
}

void validate(const NodeSet& xi)
{
    require_dim(xi.dim);
    for (const Point& p : xi.points) {
        require_match(p, xi.dim);
        if (!all_finite(p)) {
            throw Error(ErrorCode::kInvalidParameter, "node coordinates must be finite");
        }
    }
}

ConvexBody ConvexBody::box(Point lo, Point hi)
{
    require_dim(lo.dim());
    require_match(hi, lo.dim());
    for (int i = 0; i < lo.dim(); ++i) {
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(lo[i] < hi[i])) {
            throw Error(ErrorCode::kInvalidParameter, "box needs finite lo < hi in every coordinate");
        }
    }
    const int d = lo.dim();
    return ConvexBody(Box{lo, hi}, d);
}

ConvexBody ConvexBody::unit_cube(int dim)
{
    Point lo(dim);
    Point hi(dim);
    for (int i = 0; i < dim; ++i) {
        hi[i] = 1.0;
    }
    return box(lo, hi);
}

ConvexBody ConvexBody::ball(Point center, double radius)
{
    require_dim(center.dim());
    if (!all_finite(center) || !(radius > 0.0) || !std::isfinite(radius)) {
        throw Error(ErrorCode::kInvalidParameter, "ball needs a finite center and radius > 0");
    }
    const int d = center.dim();
    return ConvexBody(Ball{center, radius}, d);
}

ConvexBody ConvexBody::polygon(std::vector<Point> vertices)
{
    if (vertices.size() < 3) {
        throw Error(ErrorCode::kInvalidParameter, "polygon needs at least 3 vertices");
    }
    for (const Point& v : vertices) {
        if (v.dim() != 2) {
            throw Error(ErrorCode::kDimensionMismatch, "polygon vertices must be 2-vectors");
        }
        if (!all_finite(v)) {
            throw Error(ErrorCode::kInvalidParameter, "polygon vertices must be finite");
        }
    }
    const std::size_t n = vertices.size();
    double turning = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = vertices[i];
        const Point& b = vertices[(i + 1) % n];
        const Point& c = vertices[(i + 2) % n];
        if (!(cross(a, b, c) > 0.0)) {
            throw Error(ErrorCode::kInvalidParameter,
                        "polygon must be strictly convex with counterclockwise vertices");
        }
        const double e1 = std::atan2(b[1] - a[1], b[0] - a[0]);
        const double e2 = std::atan2(c[1] - b[1], c[0] - b[0]);
        double turn = e2 - e1;
        while (turn <= 0.0) turn += 2.0 * std::numbers::pi;
        turning += turn;
    }
    // A strictly convex simple polygon turns exactly once.
    if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6) {
        throw Error(ErrorCode::kInvalidParameter, "polygon is not simple");
    }
    return ConvexBody(Polygon2D{std::move(vertices)}, 2);
}

std::string ConvexBody::kind() const
{
    switch (v_.index()) {
    case 0: return "box";
    case 1: return "ball";
    default: return "polygon";
    }
}

bool ConvexBody::contains(const Point& x, double tol) const
{
    require_match(x, dim_);
    if (const auto* b = std::get_if<Box>(&v_)) {
        for (int i = 0; i < dim_; ++i) {
            if (x[i] < b->lo[i] - tol || x[i] > b->hi[i] + tol) {
                return false;
            }
        }
        return true;
    }
    if (const auto* b = std::get_if<Ball>(&v_)) {
        return distance_squared(x, b->center) <= (b->radius + tol) * (b->radius + tol);
    }
    const auto& vs = std::get<Polygon2D>(v_).vertices;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const Point& a = vs[i];
        const Point& b = vs[(i + 1) % vs.size()];
        const double c = cross(a, b, x);
        if (c < 0.0 && -c > tol * distance(a, b)) {
            return false;
        }
    }
    return true;
}

double unit_ball_volume(int d)
{
    if (d < 1) {
        throw Error(ErrorCode::kUnsupportedDimension, "unit ball volume needs d >= 1");
    }
    return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double ConvexBody::volume() const
{
    if (const auto* b = std::get_if<Box>(&v_)) {
        double v = 1.0;
        for (int i = 0; i < dim_; ++i) {
            v *= b->hi[i] - b->lo[i];
        }
        return v;
    }
    if (const auto* b = std::get_if<Ball>(&v_)) {
        return unit_ball_volume(dim_) * std::pow(b->radius, dim_);
    }
    const auto& vs = std::get<Polygon2D>(v_).vertices;
    double twice = 0.0;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const Point& a = vs[i];
        const Point& b = vs[(i + 1) % vs.size()];
        twice += a[0] * b[1] - a[1] * b[0];
    }
    return 0.5 * twice;
}

Box ConvexBody::bounding_box() const
{
    if (const auto* b = std::get_if<Box>(&v_)) {
        return *b;
    }
    if (const auto* b = std::get_if<Ball>(&v_)) {
        Box out{b->center, b->center};
        for (int i = 0; i < dim_; ++i) {
            out.lo[i] -= b->radius;
            out.hi[i] += b->radius;
        }
        return out;
    }
    const auto& vs = std::get<Polygon2D>(v_).vertices;
    Box out{vs.front(), vs.front()};
    for (const Point& v : vs) {
        for (int i = 0; i < 2; ++i) {
            out.lo[i] = std::min(out.lo[i], v[i]);
            out.hi[i] = std::max(out.hi[i], v[i]);
        }
    }
    return out;
}

double ConvexBody::signed_distance(const Point& x) const
{
    require_match(x, dim_);
    if (const auto* b = std::get_if<Box>(&v_)) {
        double inside = -kInf;
        double outside2 = 0.0;
        for (int i = 0; i < dim_; ++i) {
            const double q = std::max(b->lo[i] - x[i], x[i] - b->hi[i]);
            inside = std::max(inside, q);
            if (q > 0.0) {
                outside2 += q * q;
            }
        }
        return outside2 > 0.0 ? std::sqrt(outside2) : inside;
    }
    if (const auto* b = std::get_if<Ball>(&v_)) {
        return distance(x, b->center) - b->radius;
    }
    const auto& vs = std::get<Polygon2D>(v_).vertices;
    double inside = -kInf;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const Point& a = vs[i];
        const Point& b = vs[(i + 1) % vs.size()];
        inside = std::max(inside, -cross(a, b, x) / distance(a, b));
    }
    if (inside <= 0.0) {
        return inside;
    }
    double best = kInf;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        best = std::min(best, segment_distance(x, vs[i], vs[(i + 1) % vs.size()]));
    }
    return best;
}

Point ConvexBody::project(const Point& x) const
{
    require_match(x, dim_);
    if (const auto* b = std::get_if<Box>(&v_)) {
        Point y = x;
        for (int i = 0; i < dim_; ++i) {
            y[i] = std::clamp(x[i], b->lo[i], b->hi[i]);
        }
        return y;
    }
    if (const auto* b = std::get_if<Ball>(&v_)) {
        const double r = distance(x, b->center);
        if (r <= b->radius) {
            return x;
        }
        Point y = b->center;
        for (int i = 0; i < dim_; ++i) {
            y[i] += (x[i] - b->center[i]) * (b->radius / r);
        }
        return y;
    }
    if (contains(x)) {
        return x;
    }
    const auto& vs = std::get<Polygon2D>(v_).vertices;
    Point best = vs.front();
    double best_d = kInf;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const Point& a = vs[i];
        const Point& b = vs[(i + 1) % vs.size()];
        const double ex = b[0] - a[0];
        const double ey = b[1] - a[1];
        const double t = std::clamp(((x[0] - a[0]) * ex + (x[1] - a[1]) * ey) / (ex * ex + ey * ey), 0.0, 1.0);
        const Point y{a[0] + t * ex, a[1] + t * ey};
        const double dy = distance(x, y);
        if (dy < best_d) {
            best_d = dy;
            best = y;
        }
    }
    return best;
}

std::vector<Point> ConvexBody::corners() const
{
    std::vector<Point> out;
    if (const auto* b = std::get_if<Box>(&v_)) {
        for (int mask = 0; mask < (1 << dim_); ++mask) {
            Point c(dim_);
            for (int i = 0; i < dim_; ++i) {
                c[i] = (mask >> i) & 1 ? b->hi[i] : b->lo[i];
            }
            out.push_back(c);
        }
    } else if (const auto* b = std::get_if<Ball>(&v_)) {
        if (dim_ == 1) {
            out.push_back(Point{b->center[0] - b->radius});
            out.push_back(Point{b->center[0] + b->radius});
        }
    } else {
        out = std::get<Polygon2D>(v_).vertices;
    }
    return out;
}

ConvexBody ConvexBody::scaled(double s) const
{
    const auto scale = [s](Point p) {
        for (int i = 0; i < p.dim(); ++i) {
            p[i] *= s;
        }
        return p;
    };
    if (const auto* b = std::get_if<Box>(&v_)) {
        return box(scale(b->lo), scale(b->hi));
    }
    if (const auto* b = std::get_if<Ball>(&v_)) {
        return ball(scale(b->center), b->radius * s);
    }
    std::vector<Point> vs;
    for (const Point& v : std::get<Polygon2D>(v_).vertices) {
        vs.push_back(scale(v));
    }
    return polygon(std::move(vs));
}

std::optional<ConvexBody> ConvexBody::eroded(double t) const
{
    if (!(t >= 0)) {
        throw Error(ErrorCode::kInvalidParameter, "erosion depth must be nonnegative");
    }
    if (const auto* b = std::get_if<Box>(&v_)) {
        Point lo = b->lo;
        Point hi = b->hi;
        for (int i = 0; i < dim_; ++i) {
            lo[i] += t;
            hi[i] -= t;
            if (!(hi[i] - lo[i] > 1e-12 * (b->hi[i] - b->lo[i]))) {
                return std::nullopt;
            }
        }
        return box(lo, hi);
    }
    if (const auto* b = std::get_if<Ball>(&v_)) {
        if (!(b->radius - t > 1e-12 * b->radius)) {
            return std::nullopt;
        }
        return ball(b->center, b->radius - t);
    }
    // Clip by each edge's half-plane shifted inward by t.
    const auto& vs = std::get<Polygon2D>(v_).vertices;
    std::vector<Point> poly = vs;
    const std::size_t n = vs.size();
    for (std::size_t e = 0; e < n && poly.size() >= 3; ++e) {
        const Point& a = vs[e];
        const Point& b = vs[(e + 1) % n];
        const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
        // Inward normal of a CCW edge is the left normal.
        const double nx = -(b[1] - a[1]) / len;
        const double ny = (b[0] - a[0]) / len;
        const auto side = [&](const Point& p) { return (p[0] - a[0]) * nx + (p[1] - a[1]) * ny - t; };
        std::vector<Point> next;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Point& p = poly[i];
            const Point& q = poly[(i + 1) % poly.size()];
            const double sp = side(p);
            const double sq = side(q);
            if (sp >= 0) next.push_back(p);
            if ((sp >= 0) != (sq >= 0)) {
                const double u = sp / (sp - sq);
                next.push_back(Point{p[0] + u * (q[0] - p[0]), p[1] + u * (q[1] - p[1])});
            }
        }
        poly = std::move(next);
    }
    // Drop vertices that became (nearly) collinear or coincident.
    const Box bb = bounding_box();
    const double scale = std::max(bb.hi[0] - bb.lo[0], bb.hi[1] - bb.lo[1]);
    bool changed = true;
    while (changed && poly.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Point& a = poly[(i + poly.size() - 1) % poly.size()];
            const Point& c = poly[(i + 1) % poly.size()];
            if (cross(a, poly[i], c) <= 1e-12 * scale * scale) {
                poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
        }
    }
    if (poly.size() < 3) {
        return std::nullopt;
    }
    return polygon(std::move(poly));
}

double dist_point_to_nodes(const Point& x, const NodeSet& xi)
{
    if (xi.empty()) {
        throw Error(ErrorCode::kEmptyNodeSet, "node set is empty");
    }
    double best = kInf;
    for (const Point& y : xi.points) {
        require_match(y, x.dim());
        best = std::min(best, distance_squared(x, y));
    }
    return std::sqrt(best);
}

// ---------------------------------------------------------------------------
// kd-tree

namespace {
constexpr std::size_t kLeafSize = 8;
}

KdTree::KdTree(std::vector<Point> points) : points_(std::move(points))
{
    if (points_.empty()) {
        return;
    }
    dim_ = points_.front().dim();
    index_.resize(points_.size());
    for (std::size_t i = 0; i < index_.size(); ++i) {
        index_[i] = i;
    }
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    build(0, points_.size());
    // Reorder points to match the permutation for cache-friendly leaves.
    std::vector<Point> reordered(points_.size());
    order_inverse_.resize(points_.size());
    for (std::size_t i = 0; i < index_.size(); ++i) {
        reordered[i] = points_[index_[i]];
        order_inverse_[index_[i]] = i;
    }
    points_ = std::move(reordered);
}

int KdTree::build(std::size_t begin, std::size_t end)
{
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{-1, 0.0, begin, end, -1, -1});
    if (end - begin <= kLeafSize) {
        return id;
    }
    int axis = 0;
    double spread = -1.0;
    for (int a = 0; a < dim_; ++a) {
        double lo = kInf;
        double hi = -kInf;
        for (std::size_t i = begin; i < end; ++i) {
            const double v = points_[index_[i]][a];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > spread) {
            spread = hi - lo;
            axis = a;
        }
    }
    if (spread <= 0.0) {
        return id;  // all points coincide
    }
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(index_.begin() + static_cast<std::ptrdiff_t>(begin),
                     index_.begin() + static_cast<std::ptrdiff_t>(mid),
                     index_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                         const double va = points_[a][axis];
                         const double vb = points_[b][axis];
                         return va < vb || (va == vb && a < b);
                     });
    const double split = points_[index_[mid]][axis];
    const int left = build(begin, mid);
    const int right = build(mid, end);
    Node& n = nodes_[static_cast<std::size_t>(id)];
    n.axis = axis;
    n.split = split;
    n.left = left;
    n.right = right;
    return id;
}

void KdTree::nearest_rec(int node, const Point& x, Hit& best, double& best_d2) const
{
    const Node& n = nodes_[static_cast<std::size_t>(node)];
    if (n.axis < 0) {
        for (std::size_t i = n.begin; i < n.end; ++i) {
            const double d2 = distance_squared(points_[i], x);
            if (d2 < best_d2 || (d2 == best_d2 && index_[i] < best.index)) {
                best_d2 = d2;
                best.index = index_[i];
            }
        }
        return;
    }
    const double diff = x[n.axis] - n.split;
    const int near = diff < 0.0 ? n.left : n.right;
    const int far = diff < 0.0 ? n.right : n.left;
    nearest_rec(near, x, best, best_d2);
    if (diff * diff <= best_d2) {
        nearest_rec(far, x, best, best_d2);
    }
}

KdTree::Hit KdTree::nearest(const Point& x) const
{
    if (points_.empty()) {
        throw Error(ErrorCode::kEmptyNodeSet, "nearest-neighbour query on an empty set");
    }
    if (x.dim() != dim_) {
        throw Error(ErrorCode::kDimensionMismatch, "query point dimension does not match the index");
    }
    Hit best{kInf, std::numeric_limits<std::size_t>::max()};
    double best_d2 = kInf;
    nearest_rec(0, x, best, best_d2);
    best.distance = std::sqrt(best_d2);
    return best;
}

// ---------------------------------------------------------------------------
// One-sided Hausdorff distance by branch-and-bound

namespace {

// A Lipschitz parametrization of a piece of the region over a parameter box.
struct Patch {
    enum class Kind { kIdentity, kFacet, kSegment, kSphere } kind = Kind::kIdentity;
    int k = 0;  // parameter dimension
    std::array<double, kMaxDim> lo{};
    std::array<double, kMaxDim> hi{};
    double lipschitz = 1.0;
    // kFacet: fixed axis and value; kSegment: origin and unit direction; kSphere: center, radius.
    int axis = 0;
    double fixed = 0.0;
    Point origin;
    Point direction;
    double radius = 0.0;
};

Point map_patch(const Patch& p, const double* u, int d)
{
    Point x(d);
    switch (p.kind) {
    case Patch::Kind::kIdentity:
        for (int i = 0; i < d; ++i) x[i] = u[i];
        break;
    case Patch::Kind::kFacet: {
        int j = 0;
        for (int i = 0; i < d; ++i) {
            x[i] = i == p.axis ? p.fixed : u[j++];
        }
        break;
    }
    case Patch::Kind::kSegment:
        for (int i = 0; i < d; ++i) x[i] = p.origin[i] + u[0] * p.direction[i];
        break;
    case Patch::Kind::kSphere: {
        // Hyperspherical angles u[0..d-2]; the last one spans [0, 2 pi].
        double s = p.radius;
        for (int i = 0; i < d - 1; ++i) {
            x[i] = p.origin[i] + s * std::cos(u[i]);
            s *= std::sin(u[i]);
        }
        x[d - 1] = p.origin[d - 1] + s;
        break;
    }
    }
    return x;
}

std::vector<Patch> build_patches(const ConvexBody& body, Region region)
{
    const int d = body.dim();
    std::vector<Patch> out;
    if (region == Region::kInterior) {
        const Box bb = body.bounding_box();
        Patch p;
        p.kind = Patch::Kind::kIdentity;
        p.k = d;
        for (int i = 0; i < d; ++i) {
            p.lo[static_cast<std::size_t>(i)] = bb.lo[i];
            p.hi[static_cast<std::size_t>(i)] = bb.hi[i];
        }
        out.push_back(p);
        return out;
    }
    if (d == 1) {
        return out;  // the boundary is the two endpoints, handled as corners
    }
    if (const auto* b = std::get_if<Box>(&body.variant())) {
        for (int axis = 0; axis < d; ++axis) {
            for (double fixed : {b->lo[axis], b->hi[axis]}) {
                Patch p;
        p.kind = Patch::Kind::kFacet;
                p.k = d - 1;
                p.axis = axis;
                p.fixed = fixed;
                int j = 0;
                for (int i = 0; i < d; ++i) {
                    if (i != axis) {
                        p.lo[static_cast<std::size_t>(j)] = b->lo[i];
                        p.hi[static_cast<std::size_t>(j)] = b->hi[i];
                        ++j;
                    }
                }
                out.push_back(p);
            }
        }
    } else if (const auto* b = std::get_if<Ball>(&body.variant())) {
        Patch p;
        p.kind = Patch::Kind::kSphere;
        p.k = d - 1;
        p.origin = b->center;
        p.radius = b->radius;
        p.lipschitz = b->radius;
        for (int i = 0; i + 1 < d; ++i) {
            p.lo[static_cast<std::size_t>(i)] = 0.0;
            p.hi[static_cast<std::size_t>(i)] = i + 2 < d ? std::numbers::pi : 2.0 * std::numbers::pi;
        }
        out.push_back(p);
    } else {
        const auto& vs = std::get<Polygon2D>(body.variant()).vertices;
        for (std::size_t i = 0; i < vs.size(); ++i) {
            const Point& a = vs[i];
            const Point& b2 = vs[(i + 1) % vs.size()];
            const double len = distance(a, b2);
            Patch p;
        p.kind = Patch::Kind::kSegment;
            p.k = 1;
            p.origin = a;
            p.direction = Point{(b2[0] - a[0]) / len, (b2[1] - a[1]) / len};
            p.lo[0] = 0.0;
            p.hi[0] = len;
            out.push_back(p);
        }
    }
    return out;
}

struct Cell {
    std::array<double, kMaxDim> u;
    double value;
    int patch;
};

class BranchAndBound {
public:
    BranchAndBound(const ConvexBody& body, Region region, const KdTree& index)
        : body_(body), region_(region), index_(index), d_(body.dim())
    {
    }

    DistanceEstimate run(double resolution, const HausdorffOptions& opts)
    {
        const std::vector<Point> extremes = body_.corners();
        for (const Point& c : extremes) {
            consider(c, index_.nearest(c).distance);
        }
        patches_ = build_patches(body_, region_);
        half_.assign(patches_.size(), {});
        radius_.assign(patches_.size(), 0.0);

        // Initial grid: every cell maps into a ball of radius <= resolution.
        std::vector<std::array<long long, kMaxDim>> counts(patches_.size());
        double total = 0.0;
        for (std::size_t pi = 0; pi < patches_.size(); ++pi) {
            const Patch& p = patches_[pi];
            const double k = std::max(1, p.k);
            const double side = 2.0 * resolution / (p.lipschitz * std::sqrt(k));
            double cells = 1.0;
            double rho2 = 0.0;
            for (int j = 0; j < p.k; ++j) {
                const auto sj = static_cast<std::size_t>(j);
                const double len = p.hi[sj] - p.lo[sj];
                const double m = pieces(len, side);
                cells *= m;
                counts[pi][sj] = static_cast<long long>(m);
                half_[pi][sj] = 0.5 * len / m;
                rho2 += half_[pi][sj] * half_[pi][sj];
            }
            radius_[pi] = p.lipschitz * std::sqrt(rho2);
            total += cells;
        }
        if (total > opts.budget) {
            std::ostringstream os;
            os << "resolution " << resolution << " needs about " << total << " cells, above the budget of "
               << opts.budget;
            throw Error(ErrorCode::kBudget, os.str());
        }

        std::vector<Cell> active;
        for (std::size_t pi = 0; pi < patches_.size(); ++pi) {
            const Patch& p = patches_[pi];
            std::array<long long, kMaxDim> idx{};
            for (;;) {
                Cell c{{}, 0.0, static_cast<int>(pi)};
                for (int j = 0; j < p.k; ++j) {
                    const auto sj = static_cast<std::size_t>(j);
                    c.u[sj] = p.lo[sj] + (2.0 * static_cast<double>(idx[sj]) + 1.0) * half_[pi][sj];
                }
                evaluate(c, active);
                int j = 0;
                while (j < p.k && ++idx[static_cast<std::size_t>(j)] == counts[pi][static_cast<std::size_t>(j)]) {
                    idx[static_cast<std::size_t>(j)] = 0;
                    ++j;
                }
                if (j == p.k) {
                    break;
                }
            }
        }
        prune(active);

        for (int level = 0; level < opts.refinement_levels && !active.empty(); ++level) {
            for (std::size_t pi = 0; pi < patches_.size(); ++pi) {
                for (int j = 0; j < patches_[pi].k; ++j) {
                    half_[pi][static_cast<std::size_t>(j)] *= 0.5;
                }
                radius_[pi] *= 0.5;
            }
            std::vector<Cell> next;
            for (const Cell& parent : active) {
                const int k = patches_[static_cast<std::size_t>(parent.patch)].k;
                const auto& h = half_[static_cast<std::size_t>(parent.patch)];
                for (int mask = 0; mask < (1 << k); ++mask) {
                    Cell c = parent;
                    for (int j = 0; j < k; ++j) {
                        const auto sj = static_cast<std::size_t>(j);
                        c.u[sj] += (mask >> j) & 1 ? h[sj] : -h[sj];
                    }
                    evaluate(c, next);
                }
            }
            prune(next);
            active.swap(next);
        }

        double upper = best_;
        for (const Cell& c : active) {
            upper = std::max(upper, c.value + radius_[static_cast<std::size_t>(c.patch)]);
        }
        DistanceEstimate out;
        out.value = best_;
        out.gap = std::max(0.0, upper - best_);
        out.argmax = witness_;
        return out;
    }

private:
    void consider(const Point& x, double value)
    {
        if (value > best_ || (value == best_ && x.lex_less(witness_))) {
            best_ = value;
            witness_ = x;
        }
    }

    void evaluate(Cell& c, std::vector<Cell>& keep)
    {
        const Patch& p = patches_[static_cast<std::size_t>(c.patch)];
        const double r = radius_[static_cast<std::size_t>(c.patch)];
        Point x = map_patch(p, c.u.data(), d_);
        if (p.kind == Patch::Kind::kIdentity) {
            if (body_.signed_distance(x) > r) {
                return;  // the cell misses the body
            }
            // Projection onto a convex set is non-expansive, so the projected
            // center is within r of every point of the cell inside the body.
            x = body_.project(x);
        }
        c.value = index_.nearest(x).distance;
        consider(x, c.value);
        if (c.value + r > best_) {
            keep.push_back(c);
        }
    }

    void prune(std::vector<Cell>& cells) const
    {
        std::erase_if(cells, [&](const Cell& c) {
            return c.value + radius_[static_cast<std::size_t>(c.patch)] <= best_;
        });
    }

    const ConvexBody& body_;
    Region region_;
    const KdTree& index_;
    int d_;
    std::vector<Patch> patches_;
    std::vector<std::array<double, kMaxDim>> half_;
    std::vector<double> radius_;
    double best_ = -kInf;
    Point witness_;
};

}  // namespace

DistanceEstimate one_sided_hausdorff(const ConvexBody& body, Region region, const KdTree& index,
                                     double resolution, const HausdorffOptions& opts)
{
    if (index.size() == 0) {
        throw Error(ErrorCode::kEmptyNodeSet, "node set is empty");
    }
    if (!(resolution > 0.0) || !std::isfinite(resolution)) {
        throw Error(ErrorCode::kInvalidParameter, "resolution must be finite and > 0");
    }
    if (opts.refinement_levels < 0) {
        throw Error(ErrorCode::kInvalidParameter, "refinement_levels must be >= 0");
    }
    if (index.point(0).dim() != body.dim()) {
        throw Error(ErrorCode::kDimensionMismatch, "node set dimension does not match the body");
    }
    BranchAndBound bb(body, region, index);
    return bb.run(resolution, opts);
}

DistanceEstimate one_sided_hausdorff(const ConvexBody& body, Region region, const NodeSet& xi,
                                     double resolution, const HausdorffOptions& opts)
{
    if (xi.empty()) {
        throw Error(ErrorCode::kEmptyNodeSet, "node set is empty");
    }
    validate(xi);
    if (xi.dim != body.dim()) {
        throw Error(ErrorCode::kDimensionMismatch, "node set dimension does not match the body");
    }
    const KdTree index(xi.points);
    return one_sided_hausdorff(body, region, index, resolution, opts);
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

void check_budget(double count, double budget)
{
    if (count > budget) {
        std::ostringstream os;
        os << "sampling would produce about " << count << " points, above the budget of " << budget;
        throw Error(ErrorCode::kBudget, os.str());
    }
}

double sphere_count(int k, double rho, double h)
{
    if (k == 1) {
        return std::max(3.0, pieces(2.0 * std::numbers::pi * rho, h));
    }
    const double m = pieces(std::numbers::pi * rho, h);
    return (m + 1.0) * sphere_count(k - 1, rho, h);
}

// Points on the k-sphere of radius rho in R^{k+1}, centered at the origin.
std::vector<std::array<double, kMaxDim>> sample_sphere(int k, double rho, double h)
{
    std::vector<std::array<double, kMaxDim>> out;
    if (k == 1) {
        const auto n = static_cast<int>(std::max(3.0, pieces(2.0 * std::numbers::pi * rho, h)));
        for (int j = 0; j < n; ++j) {
            const double t = 2.0 * std::numbers::pi * j / n;
            out.push_back({rho * std::cos(t), rho * std::sin(t), 0.0, 0.0});
        }
        return out;
    }
    const auto m = static_cast<int>(pieces(std::numbers::pi * rho, h));
    const double step = std::numbers::pi / m;
    for (int j = 0; j <= m; ++j) {
        const double theta = step * j;
        const double s = std::sin(theta);
        if (j == 0 || j == m) {
            std::array<double, kMaxDim> p{};
            p[0] = rho * (j == 0 ? 1.0 : -1.0);
            out.push_back(p);
            continue;
        }
        // Size the ring for the widest latitude in its band.
        const double lo = theta - 0.5 * step;
        const double hi = theta + 0.5 * step;
        const double smax = (lo <= 0.5 * std::numbers::pi && hi >= 0.5 * std::numbers::pi)
                                ? 1.0
                                : std::max(std::sin(lo), std::sin(hi));
        for (const auto& q : sample_sphere(k - 1, rho * smax, h)) {
            std::array<double, kMaxDim> p{};
            p[0] = rho * std::cos(theta);
            for (int i = 0; i < k; ++i) {
                p[static_cast<std::size_t>(i + 1)] = q[static_cast<std::size_t>(i)] * s / smax;
            }
            out.push_back(p);
        }
    }
    return out;
}

std::vector<Point> sample_polyline(const std::vector<Point>& vs, double h)
{
    std::vector<Point> out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const Point& a = vs[i];
        const Point& b = vs[(i + 1) % vs.size()];
        const auto m = static_cast<int>(pieces(distance(a, b), h));
        for (int j = 0; j < m; ++j) {
            const double t = static_cast<double>(j) / m;
            out.push_back(Point{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
        }
    }
    return out;
}

}  // namespace

std::vector<Point> boundary_sample(const ConvexBody& body, double dispersion, double budget)
{
    if (!(dispersion > 0.0) || !std::isfinite(dispersion)) {
        throw Error(ErrorCode::kInvalidParameter, "dispersion must be finite and > 0");
    }
    const int d = body.dim();
    if (d == 1) {
        return body.corners();
    }
    if (const auto* b = std::get_if<Box>(&body.variant())) {
        if (d == 2) {
            const std::vector<Point> ring{b->lo, Point{b->hi[0], b->lo[1]}, b->hi, Point{b->lo[0], b->hi[1]}};
            double count = 0.0;
            for (std::size_t i = 0; i < 4; ++i) count += pieces(distance(ring[i], ring[(i + 1) % 4]), dispersion);
            check_budget(count, budget);
            return sample_polyline(ring, dispersion);
        }
        std::array<int, kMaxDim> m{};
        double count = 0.0;
        for (int i = 0; i < d; ++i) {
            m[static_cast<std::size_t>(i)] = static_cast<int>(pieces(b->hi[i] - b->lo[i], dispersion));
        }
        for (int axis = 0; axis < d; ++axis) {
            double c = 2.0;
            for (int i = 0; i < d; ++i) {
                if (i != axis) c *= m[static_cast<std::size_t>(i)] + 1.0;
            }
            count += c;
        }
        check_budget(count, budget);
        std::vector<Point> out;
        for (int axis = 0; axis < d; ++axis) {
            for (double fixed : {b->lo[axis], b->hi[axis]}) {
                std::array<int, kMaxDim> idx{};
                for (;;) {
                    Point x(d);
                    bool owned = true;
                    for (int i = 0; i < d; ++i) {
                        const auto si = static_cast<std::size_t>(i);
                        if (i == axis) {
                            x[i] = fixed;
                            continue;
                        }
                        x[i] = idx[si] == m[si] ? b->hi[i] : b->lo[i] + (b->hi[i] - b->lo[i]) * idx[si] / m[si];
                        // Edges shared with a facet of a smaller axis are emitted there.
                        if (i < axis && (idx[si] == 0 || idx[si] == m[si])) {
                            owned = false;
                        }
                    }
                    if (owned) {
                        out.push_back(x);
                    }
                    int i = 0;
                    for (; i < d; ++i) {
                        if (i == axis) continue;
                        const auto si = static_cast<std::size_t>(i);
                        if (++idx[si] <= m[si]) break;
                        idx[si] = 0;
                    }
                    if (i == d) break;
                }
            }
        }
        return out;
    }
    if (const auto* b = std::get_if<Ball>(&body.variant())) {
        check_budget(sphere_count(d - 1, b->radius, dispersion), budget);
        std::vector<Point> out;
        for (const auto& q : sample_sphere(d - 1, b->radius, dispersion)) {
            Point x(d);
            for (int i = 0; i < d; ++i) {
                x[i] = b->center[i] + q[static_cast<std::size_t>(i)];
            }
            out.push_back(x);
        }
        return out;
    }
    const auto& vs = std::get<Polygon2D>(body.variant()).vertices;
    double count = 0.0;
    for (std::size_t i = 0; i < vs.size(); ++i) count += pieces(distance(vs[i], vs[(i + 1) % vs.size()]), dispersion);
    check_budget(count, budget);
    return sample_polyline(vs, dispersion);
}

std::vector<Point> interior_sample(const ConvexBody& body, double spacing, unsigned long long seed,
                                   double budget)
{
    if (!(spacing > 0.0) || !std::isfinite(spacing)) {
        throw Error(ErrorCode::kInvalidParameter, "spacing must be finite and > 0");
    }
    const int d = body.dim();
    const Box bb = body.bounding_box();
    std::array<long long, kMaxDim> m{};
    std::array<double, kMaxDim> step{};
    double count = 1.0;
    for (int i = 0; i < d; ++i) {
        const auto si = static_cast<std::size_t>(i);
        const double len = bb.hi[i] - bb.lo[i];
        m[si] = static_cast<long long>(pieces(len, spacing));
        step[si] = len / static_cast<double>(m[si]);
        count *= static_cast<double>(m[si]);
    }
    check_budget(count, budget);

    std::mt19937_64 rng(seed);
    const auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::array<double, kMaxDim> shift{};
    for (int i = 0; i < d; ++i) {
        shift[static_cast<std::size_t>(i)] = (uniform() - 0.5) * 0.5 * step[static_cast<std::size_t>(i)];
    }
    std::vector<Point> out;
    std::array<long long, kMaxDim> idx{};
    for (;;) {
        Point x(d);
        for (int i = 0; i < d; ++i) {
            const auto si = static_cast<std::size_t>(i);
            const double jitter = (uniform() - 0.5) * 0.2 * step[si];
            x[i] = bb.lo[i] + (static_cast<double>(idx[si]) + 0.5) * step[si] + shift[si] + jitter;
        }
        if (body.contains(x)) {
            out.push_back(x);
        }
        int i = 0;
        while (i < d && ++idx[static_cast<std::size_t>(i)] == m[static_cast<std::size_t>(i)]) {
            idx[static_cast<std::size_t>(i)] = 0;
            ++i;
        }
        if (i == d) break;
    }
    return out;
}

}  // namespace isorec
