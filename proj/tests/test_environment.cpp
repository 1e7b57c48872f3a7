#include "rwre/environment.hpp"
#include "rwre/generators.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace rwre;

namespace {

CellConfiguration unit_grid(int n, Point anchor = {0, 0}, const std::string& law = "constant:1",
                            std::uint64_t seed = 0)
{
    GeneratorSpec s;
    s.n = n;
    s.anchor = anchor;
    s.law = ConductanceLaw::parse(law);
    s.seed = seed;
    return gen_grid(s);
}

// Star: centre cell 0 with neighbours at the given conductances.
CellConfiguration star(const std::vector<double>& cond)
{
    std::vector<Region> regions{square_region({{0, 0}, 1})};
    std::vector<Edge> edges;
    const Point offs[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (std::size_t k = 0; k < cond.size(); ++k) {
        regions.push_back(square_region({offs[k], 1}));
        edges.push_back({0, k + 1, cond[k]});
    }
    return CellConfiguration(regions, edges, {{-1, -1}, 3});
}

std::set<std::int64_t> id_set(const CellConfiguration& c, const std::vector<std::size_t>& idx)
{
    std::set<std::int64_t> s;
    for (std::size_t i : idx)
        s.insert(c.id(i));
    return s;
}

} // namespace

TEST_CASE("pi and pi_star examples")
{
    const CellConfiguration g = unit_grid(8);
    const auto mid = g.cell_containing({4.5, 4.5});
    REQUIRE(mid);
    CHECK(pi(g, *mid) == 4.0);
    CHECK(pi_star(g, *mid) == 4.0);
    const CellConfiguration s2 = star({2.0, 0.5});
    CHECK(s2.pi(0) == doctest::Approx(2.5));
    CHECK(s2.pi_star(0) == doctest::Approx(2.5));
    const CellConfiguration s3 = star({1, 1, 1});
    CHECK(s3.pi(0) == 3.0);
    CHECK(s3.pi_star(0) == 3.0);
    CHECK(s3.degree(0) == 3);
    CHECK(s3.holding_time(0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("conductance is stored once and read from both ends")
{
    const CellConfiguration g = unit_grid(6, {0, 0}, "uniform:1:2", 4);
    for (const Edge& e : g.edges())
        CHECK(g.conductance(e.a, e.b) == g.conductance(e.b, e.a));
    for (std::size_t i = 0; i < g.size(); ++i)
        for (const Neighbor& nb : g.neighbors(i))
            CHECK(g.conductance(nb.cell, i) == nb.conductance);
}

TEST_CASE("restrict examples against brute force")
{
    const CellConfiguration g = unit_grid(8);
    const Square box{{0, 0}, 3};
    const CellConfiguration r = restrict(g, box);
    std::size_t brute = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        brute += region_meets_square(g.region(i), box);
    CHECK(r.size() == brute);
    CHECK(r.size() == 16);
    // induced edges: 4x4 block has 2*4*3 edges
    CHECK(r.edges().size() == 24);

    const CellConfiguration one = restrict(g, Square{{2.25, 2.25}, 0.5});
    CHECK(one.size() == 1);
    CHECK(one.edges().empty());

    const CellConfiguration all = restrict(g, g.window());
    CHECK(all.size() == g.size());
    CHECK(all.edges().size() == g.edges().size());

    CHECK(restrict(g, Square{{100, 100}, 1}).empty());
}

TEST_CASE("restrict is idempotent")
{
    const CellConfiguration g = unit_grid(10, {-5, -5}, "uniform:1:2", 2);
    const Square b{{-2.5, -1.0}, 3.7};
    const CellConfiguration once = restrict(g, b);
    const CellConfiguration twice = restrict(once, b);
    CHECK(once.size() == twice.size());
    CHECK(once.edges().size() == twice.edges().size());
    CHECK(once.ids() == twice.ids());
}

TEST_CASE("boundary cells examples")
{
    const CellConfiguration g = unit_grid(8);
    const Square box{{0, 0}, 4};
    const auto bc = boundary_cells(g, box);
    std::set<std::int64_t> brute;
    const auto corners = box.corners();
    for (std::size_t i = 0; i < g.size(); ++i)
        for (int k = 0; k < 4; ++k)
            if (region_meets_segment(g.region(i), corners[k], corners[(k + 1) % 4]))
                brute.insert(g.id(i));
    CHECK(id_set(g, bc) == brute);
    // the 12 perimeter cells of the 4x4 block plus the outside ring touching the box
    CHECK(bc.size() == brute.size());

    CHECK(boundary_cells(g, Square{{2.25, 2.25}, 0.5}).size() == 1);

    // box corner at a 4-cell meeting point
    const auto corner = boundary_cells(g, Square{{3, 3}, 0.5});
    const auto ids = id_set(g, corner);
    for (const Point& p : {Point(2.5, 2.5), Point(3.5, 2.5), Point(2.5, 3.5), Point(3.5, 3.5)})
        CHECK(ids.count(g.id(*g.cell_containing(p))) == 1);
}

TEST_CASE("validate examples")
{
    const CellConfiguration g = unit_grid(8);
    const auto lines = lattice_lines(g.window(), 1.0, 0.5);
    const ValidationReport rep = validate(g, &lines);
    CHECK(rep.ok());
    CHECK(rep.lines_checked == lines.size());
    CHECK(rep.lines_connected == lines.size());

    const CellConfiguration overlap({square_region({{0, 0}, 1}), square_region({{0, 0}, 1})}, {{0, 1, 1.0}},
                                    {{0, 0}, 2});
    CHECK(validate(overlap).count(ViolationKind::Overlap) == 1);

    const CellConfiguration apart({square_region({{0, 0}, 1}), square_region({{2, 0}, 1})}, {{0, 1, 1.0}},
                                  {{0, 0}, 3});
    CHECK(validate(apart).count(ViolationKind::AdjacentDisjoint) == 1);

    const CellConfiguration neg({square_region({{0, 0}, 1}), square_region({{1, 0}, 1})}, {{0, 1, -1.0}},
                                {{0, 0}, 2});
    CHECK(validate(neg).count(ViolationKind::NonpositiveConductance) >= 1);

    const CellConfiguration loop({square_region({{0, 0}, 1})}, {{0, 0, 1.0}}, {{0, 0}, 2});
    CHECK(validate(loop).count(ViolationKind::SelfLoop) == 1);
}

TEST_CASE("disconnected line is reported")
{
    // two cells side by side with no edge: a horizontal line through both is not connected
    const CellConfiguration c({square_region({{0, 0}, 1}), square_region({{1, 0}, 1})}, {}, {{0, 0}, 2});
    const std::vector<Segment> lines{{{0.1, 0.5}, {1.9, 0.5}}};
    CHECK(validate(c, &lines).count(ViolationKind::DisconnectedAlongLine) == 1);
}

TEST_CASE("moment stats examples")
{
    const CellConfiguration g = unit_grid(16, {-8, -8});
    const MomentReport m = moment_stats(g, Square{{-4, -4}, 8});
    CHECK(m.mean_diam2_pi_over_area == doctest::Approx(8.0));
    CHECK(m.mean_diam2_pistar_over_area == doctest::Approx(8.0));

    // split grid: interior cells give 8; the rows next to the size change differ
    const CellConfiguration sg = gen_split_grid(5);
    const MomentReport ms = moment_stats(sg, Square{{0.25, 0.1}, 0.1});
    CHECK(ms.mean_diam2_pi_over_area == doctest::Approx(8.0));

    // iid Uniform[1,2]: brute-force average over the window cells
    const CellConfiguration u = unit_grid(16, {-8, -8}, "uniform:1:2", 3);
    const Square w{{-4, -4}, 8};
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double a = clipped_area(u.region(i), w);
        if (a <= 0.0)
            continue;
        num += a * u.diameter(i) * u.diameter(i) * u.pi(i) / u.area(i);
        den += a;
    }
    const MomentReport mu = moment_stats(u, w);
    CHECK(mu.mean_diam2_pi_over_area == doctest::Approx(num / den));
    CHECK(mu.mean_diam2_pi_over_area >= 8.0);
    CHECK(mu.mean_diam2_pi_over_area <= 16.0);
}

TEST_CASE("moment stats are scale invariant")
{
    const CellConfiguration u = unit_grid(12, {-6, -6}, "uniform:1:2", 8);
    const double C = 3.7;
    const CellConfiguration s = u.transformed(C, {0, 0});
    const MomentReport a = moment_stats(u, Square{{-3, -3}, 6});
    const MomentReport b = moment_stats(s, Square{Point(-3, -3) * C, 6 * C});
    CHECK(std::abs(a.mean_diam2_pi_over_area - b.mean_diam2_pi_over_area) <= 1e-12 * a.mean_diam2_pi_over_area);
}

TEST_CASE("pi is invariant under translation and relabeling")
{
    const CellConfiguration u = unit_grid(6, {0, 0}, "uniform:1:2", 1);
    const CellConfiguration t = u.transformed(1.0, {5.5, -2.25});
    for (std::size_t i = 0; i < u.size(); ++i) {
        CHECK(u.pi(i) == t.pi(i));
        CHECK(u.pi_star(i) == t.pi_star(i));
    }
    // reversed order with new ids
    std::vector<Region> regions;
    std::vector<std::int64_t> ids;
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) {
        regions.push_back(u.region(n - 1 - i));
        ids.push_back(static_cast<std::int64_t>(1000 + 7 * (n - 1 - i)));
    }
    std::vector<Edge> edges;
    for (const Edge& e : u.edges())
        edges.push_back({n - 1 - e.a, n - 1 - e.b, e.conductance});
    const CellConfiguration r(regions, edges, u.window(), {}, ids);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(r.pi(n - 1 - i) == doctest::Approx(u.pi(i)).epsilon(1e-15));
}

TEST_CASE("frozen layer and spatial queries")
{
    const CellConfiguration g = unit_grid(8);
    std::size_t frozen = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        frozen += g.frozen(i);
    CHECK(frozen == 28);
    CHECK(g.cells_meeting_disk({4, 4}, 0.5).size() == 4);
    CHECK(g.cells_meeting_segment({0.5, 0.5}, {3.5, 0.5}).size() == 4);
    CHECK_FALSE(g.cell_containing({-1, -1}).has_value());
    // half-open convention on shared edges
    CHECK(g.centroid(*g.cell_containing({1.0, 1.0})).x() == doctest::Approx(1.5));
}

TEST_CASE("construction errors")
{
    CHECK_THROWS_AS(CellConfiguration({square_region({{0, 0}, 1})}, {}, {{0, 0}, 0.0}), EnvironmentError);
    CHECK_THROWS_AS(CellConfiguration({square_region({{0, 0}, 1}), square_region({{1, 0}, 1})}, {}, {{0, 0}, 2}, {},
                                      {3, 3}),
                    EnvironmentError);
}
