#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "isorec/covering.hpp"
#include "isorec/error.hpp"

using namespace isorec;

namespace {

double e_omega(const ConvexBody& body, const NodeSet& xi, double res)
{
    return one_sided_hausdorff(body, Region::kInterior, xi, res).value;
}

}  // namespace

TEST_CASE("hexagonal covering density by integrating chord lengths")
{
    // Rectangle [0, sqrt3) x [0, 3) holds two points of the triangular lattice
    // with covering radius 1. The x-periodic union of chords at height y must
    // cover the period; the mean multiplicity is the density.
    const double w = std::sqrt(3.0);
    auto chord = [](double dy) { return dy * dy < 1 ? 2 * std::sqrt(1 - dy * dy) : 0.0; };
    // Rows y = 1.5 j, one disk per period, odd rows shifted by w / 2.
    auto multiplicity_length = [&](double y) {
        double total = 0;
        for (int j = -1; j <= 3; ++j) total += chord(y - 1.5 * j);
        return total;
    };
    for (int k = 0; k <= 3000; ++k) {
        const double y = 3.0 * k / 3000;
        std::vector<std::pair<double, double>> iv;
        for (int j = -1; j <= 3; ++j) {
            const double half = 0.5 * chord(y - 1.5 * j);
            const double cx = (j % 2 != 0) ? 0.5 * w : 0.0;
            if (half > 0) {
                for (int s = -1; s <= 1; ++s) iv.emplace_back(cx + s * w - half, cx + s * w + half);
            }
        }
        std::sort(iv.begin(), iv.end());
        double reach = 0;
        for (auto [lo, hi] : iv) {
            if (lo <= reach + 1e-12) reach = std::max(reach, hi);
        }
        CHECK(reach >= w - 1e-12);
    }
    // Composite Simpson in y, split at the kinks |y - 1.5 j| = 1.
    const std::vector<double> knots{0, 0.5, 1, 1.5, 2, 2.5, 3};
    double area = 0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const int m = 20000;
        const double a = knots[i];
        const double h = (knots[i + 1] - a) / m;
        double s = multiplicity_length(a) + multiplicity_length(knots[i + 1]);
        for (int j = 1; j < m; ++j) s += (j % 2 ? 4 : 2) * multiplicity_length(a + j * h);
        area += s * h / 3;
    }
    const double density = area / (w * 3.0);
    CHECK(std::abs(density - dens_lookup(2).value) <= 1e-6);
    CHECK(std::abs(dens_lookup(2).value - 2 * std::numbers::pi / std::sqrt(27.0)) <= 1e-15);
    CHECK(dens_lookup(2).status == DensityStatus::kExact);
}

TEST_CASE("body-centred cubic covering density by midpoint sampling")
{
    // Cube of side 1 with lattice points at integer corners and the centre;
    // covering radius sqrt5/4.
    const double rho = std::sqrt(5.0) / 4;
    const int m = 100;
    double mult = 0;
    double worst = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                const double x[3] = {(i + 0.5) / m, (j + 0.5) / m, (k + 0.5) / m};
                int count = 0;
                double nearest = 1e9;
                for (int a = -1; a <= 2; ++a)
                    for (int b = -1; b <= 2; ++b)
                        for (int c = -1; c <= 2; ++c)
                            for (double h : {0.0, 0.5}) {
                                const double dx = x[0] - a - h;
                                const double dy = x[1] - b - h;
                                const double dz = x[2] - c - h;
                                const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
                                nearest = std::min(nearest, d);
                                count += d <= rho;
                            }
                worst = std::max(worst, nearest);
                mult += count;
            }
    mult /= m * m * m;
    CHECK(worst <= rho);
    CHECK(std::abs(mult - dens_lookup(3).value) <= 1e-3);
    CHECK(std::abs(dens_lookup(3).value - 5 * std::sqrt(5.0) * std::numbers::pi / 24) <= 1e-12);
    CHECK(dens_lookup(3).status == DensityStatus::kBestKnownUpper);
    CHECK(dens_lookup(1).value == 1.0);
    CHECK(std::abs(dens_lookup(4).value - 1.7655) <= 1e-4);
    CHECK_THROWS_AS(dens_lookup(5), Error);
    CHECK_THROWS_AS(dens_lookup(0), Error);
}

TEST_CASE("asymptotic covering radius")
{
    const auto sq = ConvexBody::unit_cube(2);
    for (int n : {1, 10, 1000}) {
        CHECK(en_asymptotic(sq, n) == doctest::Approx(std::sqrt(2 / (std::sqrt(27.0) * n))).epsilon(1e-14));
        CHECK(en_asymptotic(sq.scaled(3.0), n) == doctest::Approx(3 * en_asymptotic(sq, n)).epsilon(1e-14));
    }
    CHECK(en_asymptotic(ConvexBody::ball(Point{0.0, 0.0}, 1.0), 1) == doctest::Approx(1.0996).epsilon(1e-4));
    CHECK_THROWS_AS(en_asymptotic(sq, 0), Error);
}

TEST_CASE("greedy farthest point")
{
    const auto sq = ConvexBody::unit_cube(2);
    const double res = 0.01;
    const NodeSet one = greedy_farthest_point(sq, 1, 3, res);
    CHECK(distance(one.points[0], Point{0.5, 0.5}) <= res);
    const DistanceEstimate e1 = one_sided_hausdorff(sq, Region::kInterior, one, res);
    // The node sits within res of the centre, so e exceeds sqrt(1/2) by at most res.
    CHECK(e1.value <= std::sqrt(0.5) + res + e1.gap);

    const auto unit = ConvexBody::unit_cube(1);
    const NodeSet two = greedy_farthest_point(unit, 2, 0, 1e-3);
    const NodeSet two_l = lloyd_refine(unit, two, 50, 1e-3);
    std::vector<double> xs{two_l.points[0][0], two_l.points[1][0]};
    std::sort(xs.begin(), xs.end());
    CHECK(std::abs(xs[0] - 0.25) <= 2e-3);
    CHECK(std::abs(xs[1] - 0.75) <= 2e-3);
    CHECK(e_omega(unit, two_l, 1e-4) == doctest::Approx(0.25).epsilon(1e-2));

    const double e4 = e_omega(sq, greedy_farthest_point(sq, 4, 7, res), res / 4);
    const double e5 = e_omega(sq, greedy_farthest_point(sq, 5, 7, res), res / 4);
    CHECK(e5 < e4);

    CHECK(greedy_farthest_point(sq, 12, 5, res).points == greedy_farthest_point(sq, 12, 5, res).points);
    CHECK_THROWS_AS(greedy_farthest_point(sq, 0, 0, res), Error);
}

TEST_CASE("minimax relaxation")
{
    const auto unit = ConvexBody::unit_cube(1);
    const NodeSet r = lloyd_refine(unit, NodeSet{1, {Point{0.1}, Point{0.9}}}, 100, 1e-3);
    CHECK(std::abs(r.points[0][0] - 0.25) <= 0.02);
    CHECK(std::abs(r.points[1][0] - 0.75) <= 0.02);

    const auto sq = ConvexBody::unit_cube(2);
    const NodeSet centre{2, {Point{0.5, 0.5}}};
    const NodeSet same = lloyd_refine(sq, centre, 10, 0.01);
    CHECK(distance(same.points[0], centre.points[0]) <= 1e-6);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    NodeSet random{2, {}};
    for (int i = 0; i < 4; ++i) random.points.push_back(Point{u(rng), u(rng)});
    const double before = e_omega(sq, random, 1e-3);
    const DistanceEstimate after = one_sided_hausdorff(sq, Region::kInterior, lloyd_refine(sq, random, 50, 5e-3), 1e-3);
    CHECK(after.value <= before + 5e-3);

    const NodeSet fixed{2, {Point{0.0, 0.0}, Point{0.1, 0.9}}};
    const NodeSet held = lloyd_refine(sq, fixed, 20, 0.01, 1);
    CHECK(held.points[0] == fixed.points[0]);
    CHECK_THROWS_AS(lloyd_refine(sq, NodeSet{2, {}}, 5, 0.01), Error);
}

TEST_CASE("smallest enclosing ball")
{
    const Ball b = smallest_enclosing_ball(std::vector<Point>{{0.0, 0.0}, {2.0, 0.0}, {1.0, 0.1}});
    CHECK(b.radius == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(distance(b.center, Point{1.0, 0.0}) <= 1e-12);
    const Ball tri = smallest_enclosing_ball(std::vector<Point>{{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2}});
    CHECK(tri.radius == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-12));

    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int d = 1; d <= 4; ++d) {
        std::vector<Point> pts;
        for (int i = 0; i < 300; ++i) {
            Point p(d);
            for (int k = 0; k < d; ++k) p[k] = g(rng);
            pts.push_back(p);
        }
        const Ball s = smallest_enclosing_ball(pts);
        double far = 0;
        for (const Point& p : pts) far = std::max(far, distance(p, s.center));
        CHECK(far <= s.radius * (1 + 1e-9));
        // Nudging the centre anywhere never helps: minimality up to a tiny step.
        for (int k = 0; k < d; ++k)
            for (double step : {-1e-4, 1e-4}) {
                Point c = s.center;
                c[k] += step;
                double f = 0;
                for (const Point& p : pts) f = std::max(f, distance(p, c));
                CHECK(f >= s.radius * (1 - 1e-9));
            }
    }
}

TEST_CASE("maximal separated set")
{
    const std::vector<Point> line{Point{0.0}, Point{0.4}, Point{0.8}, Point{1.2}};
    const NodeSet s = maximal_separated_set(line, 0.5);
    REQUIRE(s.size() == 2);
    CHECK(s.points[0][0] == 0.0);
    CHECK(s.points[1][0] == 0.8);
    CHECK(maximal_separated_set(std::vector<Point>{Point{0.0, 0.0}, Point{0.1, 0.0}, Point{0.0, 0.1}}, 0.5).size() == 1);
    CHECK(maximal_separated_set(std::vector<Point>{}, 0.5).empty());
    CHECK_THROWS_AS(maximal_separated_set(line, 0.0), Error);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Point> cand;
    for (int i = 0; i < 500; ++i) cand.push_back(Point{u(rng), u(rng)});
    const NodeSet z = maximal_separated_set(cand, 0.1);
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = i + 1; j < z.size(); ++j) CHECK(distance(z.points[i], z.points[j]) > 0.1);
    for (const Point& c : cand) CHECK(dist_point_to_nodes(c, z) <= 0.1);
}

TEST_CASE("lattice seeding covers the body")
{
    const auto sq = ConvexBody::unit_cube(2);
    for (int m : {10, 100, 400}) {
        const NodeSet lat = lattice_seed(sq, m, 1);
        CHECK(lat.size() <= static_cast<std::size_t>(m));
        CHECK(lat.size() >= static_cast<std::size_t>(0.9 * m));
        for (const Point& p : lat.points) CHECK(sq.contains(p, 1e-12));
    }
    const auto cube = ConvexBody::unit_cube(3);
    const NodeSet c = lattice_seed(cube, 200, 0);
    CHECK(c.size() <= 200);
    CHECK(one_sided_hausdorff(cube, Region::kInterior, c, 0.02).value <= 1.6 * en_asymptotic(cube, 200));
    CHECK_THROWS_AS(lattice_seed(ConvexBody::unit_cube(4), 10, 0), Error);
}

TEST_CASE("near-optimal node sets with a boundary layer")
{
    const auto sq = ConvexBody::unit_cube(2);
    const NodeGenReport r = build_xi_star(sq, 100, 0.5, 0, auto_resolution(sq, 100));
    CHECK(r.nodes.size() == 100);
    CHECK(r.k_n < 100);
    CHECK(r.e_boundary.value <= 0.5 * r.e_omega.value + r.e_omega.gap + r.e_boundary.gap);
    CHECK(r.boundary_layer_ok);
    for (const Point& p : r.nodes.points) CHECK(sq.contains(p, 1e-12));
    // Covering lower bound: n discs of radius e must have total area >= 1.
    CHECK(r.e_omega.value >= std::sqrt(1 / (std::numbers::pi * 100)) * 0.98);

    const NodeGenReport again = build_xi_star(sq, 100, 0.5, 0, auto_resolution(sq, 100));
    CHECK(again.nodes.points == r.nodes.points);
    CHECK(again.e_omega.value == r.e_omega.value);
    CHECK(again.k_n == r.k_n);

    double prev = 1.0;
    for (int n : {100, 400, 1600}) {
        const NodeGenReport q = build_xi_star(sq, n, kDefaultTheta, 0, 2 * auto_resolution(sq, n));
        const double frac = static_cast<double>(q.k_n) / n;
        CAPTURE(n);
        CHECK(frac < prev);
        prev = frac;
    }

    CHECK_THROWS_AS(build_xi_star(sq, 100, 0.8, 0, 0.01), Error);
    CHECK_THROWS_AS(build_xi_star(sq, 100, 0.0, 0, 0.01), Error);
    try {
        build_xi_star(sq, 8, 0.5, 0, 0.01);
        FAIL("expected n-too-small");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kNTooSmall);
    }

    const auto disk = ConvexBody::ball(Point{0.0, 0.0}, 1.0);
    const NodeGenReport d = build_xi_star(disk, 200, kDefaultTheta, 2, auto_resolution(disk, 200));
    CHECK(d.boundary_layer_ok);
    CHECK(d.e_omega.upper() <= 1.5 * std::sqrt(1.0 / 200));
}
