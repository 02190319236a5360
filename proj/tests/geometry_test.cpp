#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "isorec/error.hpp"
#include "isorec/geometry.hpp"

using namespace isorec;

namespace {

constexpr double kPi = std::numbers::pi;

NodeSet nodes2(std::initializer_list<std::pair<double, double>> pts)
{
    NodeSet xi{2, {}};
    for (const auto& [x, y] : pts) xi.points.push_back(Point{x, y});
    return xi;
}

NodeSet random_nodes(const ConvexBody& body, int n, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Box bb = body.bounding_box();
    NodeSet xi{body.dim(), {}};
    while (static_cast<int>(xi.size()) < n) {
        Point p(body.dim());
        for (int i = 0; i < body.dim(); ++i) p[i] = bb.lo[i] + (bb.hi[i] - bb.lo[i]) * u(rng);
        if (body.contains(p)) xi.points.push_back(p);
    }
    return xi;
}

ConvexBody triangle()
{
    return ConvexBody::polygon({Point{0.0, 0.0}, Point{1.0, 0.0}, Point{0.0, 1.0}});
}

}  // namespace

TEST_CASE("bodies validate their invariants")
{
    CHECK_THROWS_AS(ConvexBody::box(Point{0.0, 0.0}, Point{1.0, 0.0}), Error);
    CHECK_THROWS_AS(ConvexBody::box(Point{0.0, 0.0}, Point{1.0, 1.0, 1.0}), Error);
    CHECK_THROWS_AS(ConvexBody::ball(Point{0.0}, 0.0), Error);
    CHECK_THROWS_AS(ConvexBody::polygon({Point{0.0, 0.0}, Point{0.0, 1.0}, Point{1.0, 0.0}}), Error);
    CHECK_THROWS_AS(ConvexBody::polygon({Point{0.0, 0.0}, Point{1.0, 0.0}, Point{2.0, 0.0}}), Error);
    CHECK_THROWS_AS(Point(5), Error);
    // A pentagram has positive turns but winds twice.
    std::vector<Point> star;
    for (int i = 0; i < 5; ++i) {
        const double t = 2 * kPi * (2 * i) / 5;
        star.push_back(Point{std::cos(t), std::sin(t)});
    }
    CHECK_THROWS_AS(ConvexBody::polygon(star), Error);
}

TEST_CASE("membership and volume")
{
    const auto sq = ConvexBody::unit_cube(2);
    CHECK(sq.contains(Point{0.5, 0.5}));
    CHECK(sq.contains(Point{1.0, 1.0}));
    CHECK_FALSE(sq.contains(Point{1.0, 1.0 + 1e-12}));
    CHECK_THROWS_AS(sq.contains(Point{0.5}), Error);
    CHECK_FALSE(ConvexBody::ball(Point{0.0, 0.0, 0.0}, 1.0).contains(Point{0.0, 0.0, 1.001}));
    CHECK(ConvexBody::ball(Point{0.0, 0.0, 0.0}, 1.0).contains(Point{0.0, 0.0, 1.0}));

    CHECK(sq.volume() == 1.0);
    CHECK(ConvexBody::box(Point{0.0, -1.0, 2.0}, Point{0.5, 1.0, 5.0}).volume() == 3.0);
    CHECK(triangle().volume() == doctest::Approx(0.5));
    const auto rotated = ConvexBody::polygon({Point{1.0, 0.0}, Point{0.0, 1.0}, Point{0.0, 0.0}});
    CHECK(rotated.volume() == triangle().volume());
    for (int d = 1; d <= 4; ++d) {
        CHECK(ConvexBody::ball(Point(d), 1.7).volume() == doctest::Approx(unit_ball_volume(d) * std::pow(1.7, d)));
    }
    CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
    CHECK(unit_ball_volume(2) == doctest::Approx(kPi));
    CHECK(unit_ball_volume(3) == doctest::Approx(4 * kPi / 3));
    CHECK(unit_ball_volume(4) == doctest::Approx(kPi * kPi / 2));
}

TEST_CASE("signed distance")
{
    const auto sq = ConvexBody::unit_cube(2);
    CHECK(sq.signed_distance(Point{0.5, 0.5}) == doctest::Approx(-0.5));
    CHECK(sq.signed_distance(Point{0.1, 0.7}) == doctest::Approx(-0.1));
    CHECK(sq.signed_distance(Point{2.0, 2.0}) == doctest::Approx(std::sqrt(2.0)));
    CHECK(sq.signed_distance(Point{0.5, -0.25}) == doctest::Approx(0.25));
    const auto tri = triangle();
    CHECK(tri.signed_distance(Point{0.1, 0.1}) == doctest::Approx(-0.1));
    CHECK(tri.signed_distance(Point{1.0, 1.0}) == doctest::Approx(std::sqrt(0.5)));
    CHECK(tri.signed_distance(Point{-1.0, -1.0}) == doctest::Approx(std::sqrt(2.0)));
    CHECK(tri.project(Point{1.0, 1.0}) == Point{0.5, 0.5});
    CHECK(tri.project(Point{0.2, 0.2}) == Point{0.2, 0.2});
    CHECK(sq.project(Point{2.0, 0.5}) == Point{1.0, 0.5});
    const Point pb = ConvexBody::ball(Point{1.0, 1.0}, 2.0).project(Point{1.0, 5.0});
    CHECK(pb[0] == doctest::Approx(1.0));
    CHECK(pb[1] == doctest::Approx(3.0));
    CHECK(ConvexBody::ball(Point{1.0, 1.0}, 2.0).signed_distance(Point{1.0, 0.0}) == doctest::Approx(-1.0));
}

TEST_CASE("distance to nodes")
{
    CHECK(dist_point_to_nodes(Point{0.0, 0.0}, nodes2({{3.0, 4.0}})) == 5.0);
    CHECK(dist_point_to_nodes(Point{3.0, 4.0}, nodes2({{3.0, 4.0}})) == 0.0);
    CHECK(dist_point_to_nodes(Point{0.0, 0.0}, nodes2({{1.0, 0.0}, {0.0, 2.0}})) == 1.0);
    CHECK_THROWS_AS(dist_point_to_nodes(Point{0.0, 0.0}, NodeSet{2, {}}), Error);
}

TEST_CASE("kd-tree agrees with brute force")
{
    for (int d = 1; d <= 4; ++d) {
        const auto cube = ConvexBody::unit_cube(d);
        const NodeSet xi = random_nodes(cube, 500, 7u + static_cast<unsigned>(d));
        const KdTree tree(xi.points);
        const NodeSet probes = random_nodes(cube, 300, 99);
        for (const Point& x : probes.points) {
            const auto hit = tree.nearest(x);
            CHECK(hit.distance == doctest::Approx(dist_point_to_nodes(x, xi)).epsilon(1e-15));
            CHECK(distance(tree.point(hit.index), x) == hit.distance);
            std::size_t within = 0;
            tree.for_each_within(x, 0.2, [&](std::size_t, double) { ++within; });
            std::size_t brute = 0;
            for (const Point& y : xi.points) brute += distance(x, y) <= 0.2;
            CHECK(within == brute);
        }
    }
    // Duplicates resolve to the smaller index.
    const KdTree dup(std::vector<Point>(20, Point{0.5, 0.5}));
    CHECK(dup.nearest(Point{0.0, 0.0}).index == 0);
}

TEST_CASE("Hausdorff distance on constructed cases")
{
    const auto sq = ConvexBody::unit_cube(2);
    const NodeSet center = nodes2({{0.5, 0.5}});
    const DistanceEstimate e = one_sided_hausdorff(sq, Region::kInterior, center, 0.01);
    CHECK(e.value == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(std::abs(std::abs(e.argmax[0] - 0.5) - 0.5) == 0.0);
    CHECK(std::abs(std::abs(e.argmax[1] - 0.5) - 0.5) == 0.0);
    CHECK(e.argmax == Point{0.0, 0.0});  // lexicographic tie-break among corners
    const DistanceEstimate eb = one_sided_hausdorff(sq, Region::kBoundary, center, 0.01);
    CHECK(eb.value == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));

    // 2x2 grid: brute force over a 2001^2 lattice.
    const NodeSet grid = nodes2({{0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}});
    double brute = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        for (int j = 0; j <= 2000; ++j) {
            brute = std::max(brute, dist_point_to_nodes(Point{i / 2000.0, j / 2000.0}, grid));
        }
    }
    CHECK(brute == doctest::Approx(std::sqrt(2.0) / 4).epsilon(1e-12));
    const DistanceEstimate g = one_sided_hausdorff(sq, Region::kInterior, grid, 0.02);
    CHECK(g.value <= brute + 1e-15);
    CHECK(brute <= g.value + g.gap + 1e-15);
    CHECK(g.gap <= 0.02 / 8);

    // A node off-center: max over the interior sits at the far corner.
    const NodeSet off = nodes2({{0.2, 0.3}});
    const auto eo = one_sided_hausdorff(sq, Region::kInterior, off, 0.05);
    CHECK(eo.value == doctest::Approx(std::hypot(0.8, 0.7)));
    CHECK(eo.argmax == Point{1.0, 1.0});

    // Ball: only the sphere is extreme, so the estimate converges from below.
    const auto disk = ConvexBody::ball(Point{0.0, 0.0}, 1.0);
    const auto ed = one_sided_hausdorff(disk, Region::kInterior, nodes2({{0.3, 0.0}}), 0.01);
    CHECK(ed.value <= 1.3);
    CHECK(1.3 <= ed.value + ed.gap + 1e-12);
    CHECK(ed.gap <= 0.01 / 8 + 1e-12);
    const auto edb = one_sided_hausdorff(disk, Region::kBoundary, nodes2({{0.3, 0.0}}), 0.01);
    CHECK(edb.value <= 1.3);
    CHECK(1.3 <= edb.value + edb.gap + 1e-12);

    const NodeSet mid = nodes2({{0.5, 0.5}, {0.45, 0.5}});
    const auto em = one_sided_hausdorff(sq, Region::kBoundary, mid, 0.01);
    CHECK(em.value == doctest::Approx(std::sqrt(0.5)));
    CHECK(em.argmax == Point{1.0, 0.0});

    CHECK_THROWS_AS(one_sided_hausdorff(sq, Region::kInterior, NodeSet{2, {}}, 0.1), Error);
    CHECK_THROWS_AS(one_sided_hausdorff(sq, Region::kInterior, center, 1e-6), Error);
    CHECK_THROWS_AS(one_sided_hausdorff(sq, Region::kInterior, NodeSet{3, {Point{0.0, 0.0, 0.0}}}, 0.1),
                    Error);
}

TEST_CASE("Hausdorff estimates are sound against random probes")
{
    const std::vector<ConvexBody> bodies{
        ConvexBody::unit_cube(1),
        ConvexBody::unit_cube(2),
        ConvexBody::unit_cube(3),
        ConvexBody::ball(Point{0.0, 0.0}, 1.0),
        ConvexBody::ball(Point{0.0, 0.0, 0.0}, 0.7),
        ConvexBody::ball(Point{0.0, 0.0, 0.0, 0.0}, 1.0),
        ConvexBody::polygon({Point{0.0, 0.0}, Point{2.0, 0.0}, Point{2.5, 1.0}, Point{1.0, 2.0}, Point{-0.5, 1.0}}),
    };
    for (const auto& body : bodies) {
        CAPTURE(body.kind());
        CAPTURE(body.dim());
        const NodeSet xi = random_nodes(body, 12, 3);
        const double res = body.dim() == 4 ? 0.08 : 0.03;
        const auto e = one_sided_hausdorff(body, Region::kInterior, xi, res);
        CHECK(body.contains(e.argmax));
        CHECK(dist_point_to_nodes(e.argmax, xi) == doctest::Approx(e.value).epsilon(1e-15));
        CHECK(e.gap <= res / 8 + 1e-12);
        const NodeSet probes = random_nodes(body, 4000, 11);
        for (const Point& x : probes.points) {
            CHECK(dist_point_to_nodes(x, xi) <= e.value + e.gap);
        }
        for (const Point& c : body.corners()) {
            CHECK(dist_point_to_nodes(c, xi) <= e.value + e.gap);
        }
        const auto eb = one_sided_hausdorff(body, Region::kBoundary, xi, res);
        CHECK(eb.value <= e.value + e.gap);
        CHECK(body.boundary_distance(eb.argmax) <= 1e-12);
        for (const Point& x : boundary_sample(body, res)) {
            CHECK(dist_point_to_nodes(x, xi) <= eb.value + eb.gap);
        }

        // Adding nodes never increases the estimate beyond the gaps.
        NodeSet more = xi;
        for (const Point& p : random_nodes(body, 8, 5).points) more.points.push_back(p);
        const auto e2 = one_sided_hausdorff(body, Region::kInterior, more, res);
        CHECK(e2.value <= e.value + e.gap);
    }
}

TEST_CASE("boundary sampling")
{
    const auto sq = ConvexBody::unit_cube(2);
    const auto s = boundary_sample(sq, 0.5);
    CHECK(s.size() == 8);
    for (const Point& c : sq.corners()) {
        CHECK(std::find(s.begin(), s.end(), c) != s.end());
    }

    for (int n : {3, 7, 64, 1000}) {
        const auto circle = boundary_sample(ConvexBody::ball(Point{0.0, 0.0}, 1.0), 2 * kPi / n);
        CHECK(circle.size() == static_cast<std::size_t>(n));
        CHECK(distance(circle[0], circle[1]) == doctest::Approx(2 * std::sin(kPi / n)));
    }

    // Each edge contributes ceil(len/h) + 1 points; shared vertices appear once.
    const double h = 0.3;
    const auto tri = boundary_sample(triangle(), h);
    const double per_edge = (std::ceil(1 / h) + 1) * 2 + std::ceil(std::sqrt(2.0) / h) + 1;
    CHECK(tri.size() == static_cast<std::size_t>(per_edge - 3));

    // Dispersion: random boundary points are within h of a sample.
    std::mt19937_64 rng(1);
    std::normal_distribution<double> gauss;
    for (int d = 2; d <= 4; ++d) {
        const auto ball = ConvexBody::ball(Point(d), 1.3);
        const auto cube = ConvexBody::box(Point(d), [&] {
            Point hi(d);
            for (int i = 0; i < d; ++i) hi[i] = 1.0 + 0.25 * i;
            return hi;
        }());
        for (const auto& body : {ball, cube}) {
            const double disp = 0.2;
            const auto samples = boundary_sample(body, disp);
            const KdTree tree(samples);
            for (const Point& x : samples) CHECK(body.boundary_distance(x) <= 1e-12);
            for (int t = 0; t < 2000; ++t) {
                Point x(d);
                if (body.kind() == "ball") {
                    double norm = 0.0;
                    for (int i = 0; i < d; ++i) {
                        x[i] = gauss(rng);
                        norm += x[i] * x[i];
                    }
                    for (int i = 0; i < d; ++i) x[i] *= 1.3 / std::sqrt(norm);
                } else {
                    const Box bb = body.bounding_box();
                    std::uniform_real_distribution<double> u(0.0, 1.0);
                    for (int i = 0; i < d; ++i) x[i] = bb.lo[i] + (bb.hi[i] - bb.lo[i]) * u(rng);
                    const int axis = t % d;
                    x[axis] = t % 2 ? bb.hi[axis] : bb.lo[axis];
                }
                CHECK(tree.nearest(x).distance <= disp);
            }
            // No duplicate points.
            for (std::size_t i = 0; i < samples.size(); ++i) {
                CHECK(tree.nearest(samples[i]).index == i);
            }
        }
    }
    const auto seg = boundary_sample(ConvexBody::unit_cube(1), 0.1);
    CHECK(seg.size() == 2);
}

TEST_CASE("interior sampling is deterministic and inside")
{
    const auto disk = ConvexBody::ball(Point{0.0, 0.0}, 1.0);
    const auto a = interior_sample(disk, 0.05, 42);
    const auto b = interior_sample(disk, 0.05, 42);
    const auto c = interior_sample(disk, 0.05, 43);
    CHECK(a == b);
    CHECK(a != c);
    CHECK(static_cast<double>(a.size()) == doctest::Approx(kPi / 0.0025).epsilon(0.03));
    for (const Point& p : a) CHECK(disk.contains(p));
    CHECK_THROWS_AS(interior_sample(ConvexBody::unit_cube(3), 1e-4, 0), Error);
}

TEST_CASE("eroded bodies")
{
    const auto sq = ConvexBody::unit_cube(2);
    const auto in = sq.eroded(0.1);
    REQUIRE(in.has_value());
    CHECK(in->volume() == doctest::Approx(0.64).epsilon(1e-14));
    CHECK_FALSE(sq.eroded(0.5).has_value());
    CHECK(ConvexBody::ball(Point{1.0, 2.0, 3.0}, 2.0).eroded(0.5)->volume() ==
          doctest::Approx(4.0 / 3 * std::numbers::pi * 1.5 * 1.5 * 1.5).epsilon(1e-14));
    // Equilateral triangle of inradius 1 eroded by 0.5 is similar with ratio 1/2.
    const double s = 2 * std::sqrt(3.0);
    const auto tri = ConvexBody::polygon({Point{0.0, 0.0}, Point{s, 0.0}, Point{s / 2, 3.0}});
    const auto half = tri.eroded(0.5);
    REQUIRE(half.has_value());
    CHECK(half->volume() == doctest::Approx(tri.volume() / 4).epsilon(1e-12));
    CHECK_FALSE(tri.eroded(1.0 + 1e-9).has_value());
    // Every point of the eroded body is at depth >= t in the original.
    const auto pent = ConvexBody::polygon({Point{0.0, 0.0}, Point{2.0, 0.0}, Point{2.5, 1.5}, Point{1.0, 2.5}, Point{-0.5, 1.5}});
    const auto core = pent.eroded(0.3);
    REQUIRE(core.has_value());
    for (const Point& p : interior_sample(*core, 0.05, 1)) CHECK(pent.signed_distance(p) <= -0.3 + 1e-12);
    for (const Point& p : boundary_sample(*core, 0.05)) CHECK(pent.signed_distance(p) == doctest::Approx(-0.3).epsilon(1e-9));
}
