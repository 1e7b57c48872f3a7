#include "rwre/geometry.hpp"
#include "rwre/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rwre;

namespace {

// Discrete Fréchet distance (Eiter-Mannila) of two point sequences.
double discrete_frechet(const std::vector<Point>& p, const std::vector<Point>& q)
{
    const std::size_t n = p.size(), m = q.size();
    std::vector<double> ca(n * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double d = (p[i] - q[j]).norm();
            double prev;
            if (i == 0 && j == 0)
                prev = 0.0;
            else if (i == 0)
                prev = ca[j - 1];
            else if (j == 0)
                prev = ca[(i - 1) * m];
            else
                prev = std::min({ca[(i - 1) * m + j], ca[(i - 1) * m + j - 1], ca[i * m + j - 1]});
            ca[i * m + j] = std::max(prev, d);
        }
    return ca.back();
}

std::vector<Point> densify(const std::vector<Point>& p, int per_segment)
{
    std::vector<Point> out;
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        for (int k = 0; k < per_segment; ++k)
            out.push_back(p[i] + (p[i + 1] - p[i]) * (static_cast<double>(k) / per_segment));
    out.push_back(p.back());
    return out;
}

std::vector<Point> random_polyline(CounterRng& rng, int n)
{
    std::vector<Point> p;
    for (int i = 0; i < n; ++i)
        p.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1));
    return p;
}

TimedCurve uniform_timed(const std::vector<Point>& p)
{
    std::vector<double> t;
    for (std::size_t i = 0; i < p.size(); ++i)
        t.push_back(static_cast<double>(i));
    return make_curve(t, p);
}

Region ngon(int n, double r)
{
    Ring ring;
    for (int k = 0; k < n; ++k) {
        const double a = 2.0 * std::numbers::pi * k / n;
        ring.emplace_back(r * std::cos(a), r * std::sin(a));
    }
    return polygon_region(ring);
}

} // namespace

TEST_CASE("region area examples")
{
    CHECK(region_area(square_region({{0, 0}, 1})) == doctest::Approx(1.0));
    CHECK(region_area(square_region({{0, 0}, 2})) == doctest::Approx(4.0));
    CHECK(region_area(polygon_region({{0, 0}, {1, 0}, {0, 1}})) == doctest::Approx(0.5));
}

TEST_CASE("degenerate rings are rejected")
{
    CHECK_THROWS_AS(normalized_region(Region{{Polygon{{{0, 0}, {1, 0}}, {}}}}), GeometryError);
    CHECK_THROWS_AS(normalized_region(Region{{Polygon{{{0, 0}, {1, 0}, {2, 0}}, {}}}}), GeometryError);
    // bow tie
    CHECK_THROWS_AS(normalized_region(Region{{Polygon{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}, {}}}}), GeometryError);
}

TEST_CASE("clockwise input is reoriented")
{
    const Region r = normalized_region(Region{{Polygon{{{0, 0}, {0, 1}, {1, 1}, {1, 0}}, {}}}});
    CHECK(ring_signed_area(r.components[0].outer) > 0.0);
}

TEST_CASE("centroid examples")
{
    const Point c0 = region_centroid(square_region({{0, 0}, 1}));
    CHECK(c0.x() == doctest::Approx(0.5));
    CHECK(c0.y() == doctest::Approx(0.5));
    const Point c1 = region_centroid(transformed_region(square_region({{0, 0}, 1}), 1.0, {3, 4}));
    CHECK(c1.x() == doctest::Approx(3.5));
    CHECK(c1.y() == doctest::Approx(4.5));
    Region two = square_region({{0, 0}, 1});
    two.components.push_back(square_region({{2, 0}, 1}).components[0]);
    const Point c2 = region_centroid(two);
    CHECK(c2.x() == doctest::Approx(1.5));
    CHECK(c2.y() == doctest::Approx(0.5));
}

TEST_CASE("holes subtract area and shift the centroid")
{
    Region r = square_region({{0, 0}, 4});
    r.components[0].holes.push_back({{1, 1}, {2, 1}, {2, 2}, {1, 2}});
    r = normalized_region(r);
    CHECK(region_area(r) == doctest::Approx(15.0));
    // (16 * 2 - 1 * 1.5) / 15
    CHECK(region_centroid(r).x() == doctest::Approx((32.0 - 1.5) / 15.0));
}

TEST_CASE("diameter examples")
{
    CHECK(region_diameter(square_region({{0, 0}, 1})) == doctest::Approx(std::sqrt(2.0)));
    CHECK(region_diameter(rect_region({0, 0}, {3, 0.01})) == doctest::Approx(std::sqrt(9.0001)));
    // brute force over vertex pairs
    const Region g = ngon(64, 1.0);
    double best = 0.0;
    for (const Point& a : g.components[0].outer)
        for (const Point& b : g.components[0].outer)
            best = std::max(best, (a - b).norm());
    CHECK(region_diameter(g) == doctest::Approx(best).epsilon(1e-14));
    CHECK(std::abs(region_diameter(g) - 2.0) <= 1e-3);
}

TEST_CASE("area, centroid and diameter under similarity")
{
    CounterRng rng(11, 0);
    for (int t = 0; t < 50; ++t) {
        const Region r = ngon(3 + static_cast<int>(rng.below(20)), rng.uniform(0.5, 3.0));
        const double C = rng.uniform(0.1, 10.0);
        const Point z(rng.uniform(-50, 50), rng.uniform(-50, 50));
        const Region s = transformed_region(r, C, z);
        CHECK(std::abs(region_area(s) - C * C * region_area(r)) <= 1e-12 * C * C * region_area(r) * 10);
        CHECK((region_centroid(transformed_region(r, 1.0, z)) - region_centroid(r) - z).norm() <= 1e-12 * 100);
        CHECK(std::abs(region_diameter(s) - C * region_diameter(r)) <= 1e-12 * C * region_diameter(r) * 10);
    }
}

TEST_CASE("point queries")
{
    const Region r = square_region({{0, 0}, 2});
    CHECK(point_in_region(r, {1, 1}));
    CHECK_FALSE(point_in_region(r, {3, 1}));
    CHECK(point_region_distance(r, {3, 1}) == doctest::Approx(1.0));
    CHECK(point_region_distance(r, {1, 1}) == 0.0);
    CHECK(boundary_distance(r, {1, 0.5}) == doctest::Approx(0.5));
    CHECK(region_distance(square_region({{0, 0}, 1}), square_region({{2, 0}, 1})) == doctest::Approx(1.0));
    CHECK(region_meets_square(r, {{2, 2}, 1}));
    CHECK_FALSE(region_meets_square(r, {{2.5, 2.5}, 1}));
    CHECK(region_meets_segment(r, {-1, 1}, {3, 1}));
    CHECK(region_meets_disk(r, {3, 1}, 1.0));
    CHECK_FALSE(region_meets_disk(r, {3, 1}, 0.9));
}

TEST_CASE("clipped and intersection areas")
{
    const Region r = square_region({{0, 0}, 2});
    CHECK(clipped_area(r, Square{{1, 1}, 2}) == doctest::Approx(1.0));
    CHECK(clipped_area(r, Square{{5, 5}, 1}) == doctest::Approx(0.0));
    CHECK(intersection_area(r, square_region({{1, 0}, 2})) == doctest::Approx(2.0));
    CHECK(intersection_area(r, r) == doctest::Approx(4.0));
    // triangle clipped by the unit square: brute-force grid count
    const Region tri = polygon_region({{-0.5, -0.5}, {1.5, -0.5}, {-0.5, 1.5}});
    const int N = 1000;
    long inside = 0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const Point p((i + 0.5) / N, (j + 0.5) / N);
            inside += point_in_region(tri, p);
        }
    CHECK(clipped_area(tri, Square{{0, 0}, 1}) == doctest::Approx(static_cast<double>(inside) / (N * N)).epsilon(2e-3));
}

TEST_CASE("dcmp examples")
{
    const TimedCurve a = make_curve({0, 1}, {{0, 0}, {1, 0}});
    CHECK(dcmp(a, a) == doctest::Approx(0.0).epsilon(1e-9));
    for (double delta : {0.01, 0.3, 2.0}) {
        const TimedCurve b = make_curve({0, 1}, {{0, delta}, {1, delta}});
        CHECK(std::abs(dcmp(a, b) - delta) <= 1e-9);
    }
    const TimedCurve c = make_curve({0, 1, 2, 3}, {{0, 0}, {1, 2}, {3, -1}, {4, 4}});
    const TimedCurve c2 = make_curve({0, 1, 4, 9}, {{0, 0}, {1, 2}, {3, -1}, {4, 4}});
    CHECK(dcmp(c, c2) == 0.0);
}

TEST_CASE("timed curves need increasing times")
{
    CHECK_THROWS(make_curve({0, 0}, {{0, 0}, {1, 0}}));
    CHECK_THROWS(make_curve({0}, {{0, 0}}));
}

TEST_CASE("frechet distance against a dense discrete oracle")
{
    CounterRng rng(5, 1);
    for (int t = 0; t < 20; ++t) {
        const auto p = random_polyline(rng, 2 + static_cast<int>(rng.below(5)));
        const auto q = random_polyline(rng, 2 + static_cast<int>(rng.below(5)));
        const double f = frechet_distance(p, q);
        const int per = 200;
        const double disc = discrete_frechet(densify(p, per), densify(q, per));
        double step = 0.0;
        for (const auto* poly : {&p, &q})
            for (std::size_t i = 0; i + 1 < poly->size(); ++i)
                step = std::max(step, ((*poly)[i + 1] - (*poly)[i]).norm() / per);
        CHECK(f <= disc + 1e-9);
        CHECK(disc <= f + step + 1e-9);
    }
}

TEST_CASE("dcmp metric properties")
{
    CounterRng rng(9, 2);
    for (int t = 0; t < 100; ++t) {
        const auto a = uniform_timed(random_polyline(rng, 2 + static_cast<int>(rng.below(4))));
        const auto b = uniform_timed(random_polyline(rng, 2 + static_cast<int>(rng.below(4))));
        const auto c = uniform_timed(random_polyline(rng, 2 + static_cast<int>(rng.below(4))));
        const double ab = dcmp(a, b), ba = dcmp(b, a), bc = dcmp(b, c), ac = dcmp(a, c);
        CHECK(ab >= 0.0);
        CHECK(std::abs(ab - ba) <= 1e-9);
        CHECK(ac <= ab + bc + 1e-9);
    }
}

TEST_CASE("dcmp ignores the parameterization but not the order")
{
    const std::vector<Point> pts{{0, 0}, {1, 0}, {1, 1}};
    const TimedCurve a = uniform_timed(pts);
    const TimedCurve rev = uniform_timed({{1, 1}, {1, 0}, {0, 0}});
    CHECK(dcmp(a, rev) > 0.5);
    // inserting a collinear vertex does not change the trace
    const TimedCurve mid = make_curve({0, 0.2, 1, 2}, {{0, 0}, {0.5, 0}, {1, 0}, {1, 1}});
    CHECK(dcmp(a, mid) <= 1e-9);
}

TEST_CASE("dcmp_loc examples")
{
    const TimedCurve a = make_curve({0, 1, 2}, {{0, 0}, {10, 0}, {10, 10}});
    CHECK(dcmp_loc(a, a, 8.0, 32).value <= 1e-9);
    // identical inside B_5(0), different afterwards
    const TimedCurve b = make_curve({0, 1, 2}, {{0, 0}, {10, 0}, {10, -10}});
    const LocalDistance d = dcmp_loc(a, b, 5.0, 32);
    CHECK(d.value <= std::exp(-5.0) + 1e-12);
    CHECK(d.tail_bound == doctest::Approx(std::exp(-5.0)));
    // unrelated random curves
    CounterRng rng(3, 3);
    std::vector<Point> p, q;
    for (int i = 0; i < 10; ++i) {
        p.emplace_back(rng.uniform(-4, 4), rng.uniform(-4, 4));
        q.emplace_back(rng.uniform(-4, 4), rng.uniform(-4, 4));
    }
    const double v = dcmp_loc(uniform_timed(p), uniform_timed(q), 6.0, 40).value;
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
}

TEST_CASE("stopped trace ends on the circle")
{
    const TimedCurve a = make_curve({0, 1}, {{0, 0}, {4, 0}});
    const auto s = stopped_trace(a, 2.0);
    REQUIRE(s.size() == 2);
    CHECK(s.back().x() == doctest::Approx(2.0));
}
