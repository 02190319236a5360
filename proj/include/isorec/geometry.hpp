#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace isorec {

inline constexpr int kMaxDim = 4;

/// Point in R^d, d <= 4, stored inline.
class Point {
public:
    Point() = default;
    explicit Point(int dim);
    Point(std::initializer_list<double> coords);
    static Point from(std::span<const double> coords);

    int dim() const noexcept { return dim_; }
    double& operator[](int i) noexcept { return c_[static_cast<std::size_t>(i)]; }
    double operator[](int i) const noexcept { return c_[static_cast<std::size_t>(i)]; }
    std::span<const double> coords() const noexcept { return {c_.data(), static_cast<std::size_t>(dim_)}; }

    bool operator==(const Point& other) const noexcept;
    /// Lexicographic order on coordinates (used for deterministic tie-breaks).
    bool lex_less(const Point& other) const noexcept;

private:
    std::array<double, kMaxDim> c_{};
    int dim_ = 0;
};

double distance_squared(const Point& a, const Point& b) noexcept;
double distance(const Point& a, const Point& b) noexcept;

struct NodeSet {
    int dim = 0;
    std::vector<Point> points;

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }
};

/// Throws dimension-mismatch if any point disagrees with `dim`.
void validate(const NodeSet& xi);

struct Box {
    Point lo;
    Point hi;
};

struct Ball {
    Point center;
    double radius = 1.0;
};

/// Strictly convex polygon, vertices counterclockwise.
struct Polygon2D {
    std::vector<Point> vertices;
};

class ConvexBody {
public:
    using Variant = std::variant<Box, Ball, Polygon2D>;

    static ConvexBody box(Point lo, Point hi);
    static ConvexBody unit_cube(int dim);
    static ConvexBody ball(Point center, double radius);
    static ConvexBody polygon(std::vector<Point> vertices);

    const Variant& variant() const noexcept { return v_; }
    int dim() const noexcept { return dim_; }
    std::string kind() const;

    /// Closed membership, optionally enlarged by `tol`.
    bool contains(const Point& x, double tol = 0.0) const;
    double volume() const;
    Box bounding_box() const;
    /// Negative depth inside, Euclidean distance to the body outside.
    double signed_distance(const Point& x) const;
    /// Nearest point of the body (identity inside).
    Point project(const Point& x) const;
    /// Distance from x to the boundary (x inside or outside).
    double boundary_distance(const Point& x) const { return std::abs(signed_distance(x)); }
    /// Extreme points that sampling must never miss: box corners, polygon vertices.
    std::vector<Point> corners() const;
    /// Same body scaled by s about the origin.
    ConvexBody scaled(double s) const;
    /// Inner parallel body {x : signed_distance(x) <= -t}; nullopt once it has no interior.
    std::optional<ConvexBody> eroded(double t) const;

private:
    ConvexBody(Variant v, int dim) : v_(std::move(v)), dim_(dim) {}
    Variant v_;
    int dim_;
};

double unit_ball_volume(int d);

/// min over y in xi of |x - y|, by brute force.
double dist_point_to_nodes(const Point& x, const NodeSet& xi);

/// Static kd-tree for nearest-neighbour and fixed-radius queries.
class KdTree {
public:
    KdTree() = default;
    explicit KdTree(std::vector<Point> points);

    std::size_t size() const noexcept { return points_.size(); }
    const Point& point(std::size_t original_index) const { return points_[order_inverse_[original_index]]; }

    struct Hit {
        double distance;
        std::size_t index;
    };
    /// Nearest point; ties resolve to the smaller original index.
    Hit nearest(const Point& x) const;

    /// Calls fn(original_index, squared_distance) for every point with |p - x| <= radius.
    template <class Fn>
    void for_each_within(const Point& x, double radius, Fn&& fn) const;

private:
    struct Node {
        int axis = -1;
        double split = 0.0;
        std::size_t begin = 0;
        std::size_t end = 0;
        int left = -1;
        int right = -1;
    };

    int build(std::size_t begin, std::size_t end);
    void nearest_rec(int node, const Point& x, Hit& best, double& best_d2) const;

    std::vector<Point> points_;
    std::vector<std::size_t> index_;
    std::vector<std::size_t> order_inverse_;
    std::vector<Node> nodes_;
    int dim_ = 0;
};

template <class Fn>
void KdTree::for_each_within(const Point& x, double radius, Fn&& fn) const
{
    if (nodes_.empty()) {
        return;
    }
    const double r2 = radius * radius;
    int stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& n = nodes_[static_cast<std::size_t>(stack[--top])];
        if (n.axis < 0) {
            for (std::size_t i = n.begin; i < n.end; ++i) {
                const double d2 = distance_squared(points_[i], x);
                if (d2 <= r2) {
                    fn(index_[i], d2);
                }
            }
            continue;
        }
        const double diff = x[n.axis] - n.split;
        if (diff <= radius) {
            stack[top++] = n.left;
        }
        if (diff >= -radius) {
            stack[top++] = n.right;
        }
    }
}

/// Certified estimate of a supremum: the truth lies in [value, value + gap].
struct DistanceEstimate {
    double value = 0.0;
    double gap = 0.0;
    Point argmax;

    double upper() const noexcept { return value + gap; }
};

enum class Region { kInterior, kBoundary };

struct HausdorffOptions {
    int refinement_levels = 3;
    double budget = 1e8;
};

/// e(Omega, xi) or e(boundary of Omega, xi) by branch-and-bound over cells of
/// radius <= resolution, using that x -> e(x, xi) is 1-Lipschitz.
DistanceEstimate one_sided_hausdorff(const ConvexBody& body, Region region, const NodeSet& xi,
                                     double resolution, const HausdorffOptions& opts = {});
DistanceEstimate one_sided_hausdorff(const ConvexBody& body, Region region, const KdTree& index,
                                     double resolution, const HausdorffOptions& opts = {});

/// Points on the boundary whose spacing along every boundary parameter is <= dispersion.
std::vector<Point> boundary_sample(const ConvexBody& body, double dispersion, double budget = 1e8);

/// Grid over the bounding box with the given spacing, shifted and jittered by
/// `seed`, filtered to the body.
std::vector<Point> interior_sample(const ConvexBody& body, double spacing, unsigned long long seed,
                                   double budget = 1e8);

}  // namespace isorec
