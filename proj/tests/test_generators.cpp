#include "rwre/generators.hpp"

#include <doctest.h>

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>

using namespace rwre;

namespace {

GeneratorSpec spec_of(const std::string& variant, int n, std::uint64_t seed = 0)
{
    GeneratorSpec s;
    s.variant = variant;
    s.n = n;
    s.seed = seed;
    return s;
}

double total_area(const CellConfiguration& c)
{
    double a = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        a += c.area(i);
    return a;
}

// Percolation faces by flood fill over plaquettes, with the edge states drawn
// in the generator's documented order (vertical interior edges row by row,
// then horizontal ones, both from stream 1).
struct FloodFaces {
    std::vector<int> label;
    int faces = 0;
    std::size_t separating_open_edges = 0;
};

FloodFaces flood_faces(int n, double p, std::uint64_t seed)
{
    CounterRng rng(seed, 1);
    std::vector<char> v((n + 1) * n, 0), h((n + 1) * n, 0);
    for (int j = 0; j < n; ++j)
        for (int i = 1; i < n; ++i)
            v[i + (n + 1) * j] = rng.uniform() < p;
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < n; ++i)
            h[i + n * j] = rng.uniform() < p;
    FloodFaces out;
    out.label.assign(n * n, -1);
    for (int s = 0; s < n * n; ++s) {
        if (out.label[s] >= 0)
            continue;
        std::deque<int> q{s};
        out.label[s] = out.faces;
        while (!q.empty()) {
            const int x = q.front();
            q.pop_front();
            const int i = x % n, j = x / n;
            auto go = [&](int ni, int nj, bool open) {
                if (open)
                    return;
                const int y = ni + n * nj;
                if (out.label[y] < 0) {
                    out.label[y] = out.faces;
                    q.push_back(y);
                }
            };
            if (i > 0)
                go(i - 1, j, v[i + (n + 1) * j]);
            if (i + 1 < n)
                go(i + 1, j, v[i + 1 + (n + 1) * j]);
            if (j > 0)
                go(i, j - 1, h[i + n * j]);
            if (j + 1 < n)
                go(i, j + 1, h[i + n * (j + 1)]);
        }
        ++out.faces;
    }
    for (int j = 0; j < n; ++j)
        for (int i = 1; i < n; ++i)
            out.separating_open_edges += v[i + (n + 1) * j] && out.label[i - 1 + n * j] != out.label[i + n * j];
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < n; ++i)
            out.separating_open_edges += h[i + n * j] && out.label[i + n * (j - 1)] != out.label[i + n * j];
    return out;
}

} // namespace

TEST_CASE("grid examples")
{
    const CellConfiguration g = gen_grid(spec_of("grid", 4));
    CHECK(g.size() == 16);
    CHECK(g.edges().size() == 24);
    for (const Edge& e : g.edges())
        CHECK(e.conductance == 1.0);

    GeneratorSpec u = spec_of("grid", 16, 3);
    u.law = ConductanceLaw::parse("uniform:1:2");
    const CellConfiguration gu = gen_grid(u);
    for (const Edge& e : gu.edges()) {
        CHECK(e.conductance >= 1.0);
        CHECK(e.conductance <= 2.0);
    }

    GeneratorSpec sh = spec_of("grid", 8, 5);
    sh.shift = true;
    const CellConfiguration gs = gen_grid(sh);
    const Point c = gs.centroid(*gs.cell_containing({0, 0}));
    CHECK(c.x() - std::floor(c.x()) != doctest::Approx(0.5));
}

TEST_CASE("shifted grid has the same per-cell moments")
{
    GeneratorSpec s = spec_of("grid", 12, 2);
    s.law = ConductanceLaw::parse("uniform:1:2");
    const CellConfiguration a = gen_grid(s);
    s.shift = true;
    const CellConfiguration b = gen_grid(s);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.pi(i) == b.pi(i));
        CHECK(a.diameter(i) == doctest::Approx(b.diameter(i)));
    }
}

TEST_CASE("conductance laws")
{
    CHECK(ConductanceLaw::parse("2.5").kind == ConductanceLaw::Kind::Constant);
    CHECK(ConductanceLaw::parse("constant:3").a == 3.0);
    const ConductanceLaw t = ConductanceLaw::parse("two:1:100:0.25");
    CHECK(t.kind == ConductanceLaw::Kind::TwoPoint);
    CHECK(ConductanceLaw::parse(t.to_string()).b == 100.0);
    CounterRng rng(1, 1);
    int low = 0;
    for (int i = 0; i < 4000; ++i)
        low += t.sample(rng) == 1.0;
    CHECK(low == doctest::Approx(1000).epsilon(0.1));
    CHECK_THROWS_AS(ConductanceLaw::parse("uniform:2:1"), GeneratorError);
    CHECK_THROWS_AS(ConductanceLaw::parse("bogus"), GeneratorError);
    CHECK_THROWS_AS(ConductanceLaw::parse("constant:-1"), GeneratorError);
}

TEST_CASE("spec checks")
{
    GeneratorSpec s = spec_of("grid", 3);
    CHECK_THROWS_AS(s.check(), GeneratorError);
    s = spec_of("nope", 8);
    CHECK_THROWS_AS(s.check(), GeneratorError);
    s = spec_of("long_range", 8);
    s.range = 0;
    CHECK_THROWS_AS(s.check(), GeneratorError);
    s = spec_of("split_grid", 8);
    s.k = 10;
    CHECK_THROWS_AS(s.check(), GeneratorError);
    CHECK_THROWS_AS(gen_split_grid(0), GeneratorError);
}

TEST_CASE("split grid examples")
{
    const CellConfiguration k1 = gen_split_grid(1);
    CHECK(k1.size() == 10);
    for (int k = 1; k <= 6; ++k) {
        const CellConfiguration s = gen_split_grid(k);
        const std::size_t lower = (std::size_t{1} << k) * (std::size_t{1} << (k - 1));
        const std::size_t upper = (std::size_t{1} << (k + 1)) * (std::size_t{1} << k);
        CHECK(s.size() == lower + upper);
        CHECK(total_area(s) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.bounded());
        const double h = std::ldexp(1.0, -k);
        for (std::size_t i = 0; i < s.size(); ++i) {
            const Point c = s.centroid(i);
            if (s.area(i) == doctest::Approx(h * h) && c.y() > 0.5 - h) {
                int up = 0;
                for (const Neighbor& nb : s.neighbors(i))
                    up += s.centroid(nb.cell).y() > 0.5;
                CHECK(up == 2);
            }
        }
    }
}

TEST_CASE("percolation extremes")
{
    GeneratorSpec s = spec_of("percolation", 8, 1);
    s.p = 1.0;
    const CellConfiguration all = gen_percolation_faces(s);
    CHECK(all.size() == 64);
    CHECK(all.edges().size() == 2 * 8 * 7);
    for (std::size_t i = 0; i < all.size(); ++i)
        CHECK(all.area(i) == doctest::Approx(1.0));
    s.p = 0.0;
    const CellConfiguration none = gen_percolation_faces(s);
    CHECK(none.size() == 1);
    CHECK(none.edges().empty());
    CHECK(none.area(0) == doctest::Approx(64.0));
}

TEST_CASE("percolation faces against flood fill")
{
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        for (double p : {0.3, 0.5, 0.7}) {
            GeneratorSpec s = spec_of("percolation", 64, seed);
            s.p = p;
            const CellConfiguration c = gen_percolation_faces(s);
            const FloodFaces f = flood_faces(64, p, seed);
            CHECK(static_cast<int>(c.size()) == f.faces);
            CHECK(total_area(c) == doctest::Approx(64.0 * 64.0).epsilon(1e-12));
            std::vector<double> got, want(f.faces, 0.0);
            for (std::size_t i = 0; i < c.size(); ++i)
                got.push_back(c.area(i));
            for (int l : f.label)
                want[l] += 1.0;
            std::sort(got.begin(), got.end());
            std::sort(want.begin(), want.end());
            for (std::size_t i = 0; i < got.size() && i < want.size(); ++i)
                CHECK(got[i] == doctest::Approx(want[i]));
            double cond = 0.0;
            for (const Edge& e : c.edges())
                cond += e.conductance;
            CHECK(cond == static_cast<double>(f.separating_open_edges));
            CHECK(validate(c).ok());
        }
    }
}

TEST_CASE("long range examples")
{
    GeneratorSpec s = spec_of("long_range", 9);
    s.range = 1;
    const CellConfiguration one = gen_long_range(s);
    const auto mid = *one.cell_containing({0, 0});
    CHECK(one.degree(mid) == 4);

    s.range = 2;
    const CellConfiguration two = gen_long_range(s);
    const auto m2 = *two.cell_containing({0, 0});
    int brute = 0;
    for (int dx = -2; dx <= 2; ++dx)
        for (int dy = -2; dy <= 2; ++dy)
            brute += (dx || dy) && dx * dx + dy * dy <= 4;
    CHECK(two.degree(m2) == static_cast<std::size_t>(brute));
    CHECK(brute == 12);
    for (std::size_t i = 0; i < two.size(); ++i) {
        CHECK(two.area(i) >= 0.25);
        CHECK(two.area(i) <= 0.26);
    }
    CHECK(validate(two).ok());
}

TEST_CASE("big cell and two scale tilings")
{
    GeneratorSpec b = spec_of("big_cell", 32);
    b.big = 8;
    const CellConfiguration bc = gen_big_cell(b);
    CHECK(bc.size() == 32 * 32 - 64 + 1);
    CHECK(total_area(bc) == doctest::Approx(1024.0));
    const auto big = *bc.cell_containing({0.1, 0.1});
    CHECK(bc.area(big) == doctest::Approx(64.0));
    CHECK(bc.degree(big) == 32);
    CHECK(validate(bc).ok());

    const CellConfiguration ts = gen_two_scale(spec_of("two_scale", 16));
    CHECK(ts.size() == 8 * 8 / 2 * 1 + 16 * 8);
    CHECK(total_area(ts) == doctest::Approx(256.0));
    CHECK(validate(ts).ok());
}

TEST_CASE("vertex cells of the unit grid")
{
    const CellConfiguration g = gen_grid(spec_of("grid", 6));
    const CellConfiguration v = vertex_cells(g);
    REQUIRE(g.lattice());
    CHECK(v.size() == 49);
    CHECK(total_area(v) == doctest::Approx(36.0));
    // interior vertex: four quarter squares
    const auto c = *v.cell_containing({0.1, 0.1});
    CHECK(v.area(c) == doctest::Approx(1.0));
    CHECK(v.degree(c) == 4);
    // degree equals lattice degree everywhere
    std::vector<std::size_t> ldeg(g.lattice()->vertices.size(), 0);
    for (const Edge& e : g.lattice()->edges) {
        ++ldeg[e.a];
        ++ldeg[e.b];
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point x = v.centroid(i);
        std::size_t best = 0;
        for (std::size_t k = 1; k < ldeg.size(); ++k)
            if ((g.lattice()->vertices[k] - x).norm() < (g.lattice()->vertices[best] - x).norm())
                best = k;
        CHECK(v.degree(i) == ldeg[best]);
    }
    // faces without lattice data
    CHECK_THROWS(vertex_cells(gen_split_grid(2)));
}

TEST_CASE("vertex cells of percolation faces keep the area")
{
    GeneratorSpec s = spec_of("percolation", 16, 4);
    s.p = 0.6;
    const CellConfiguration f = gen_percolation_faces(s);
    if (f.lattice()) {
        const CellConfiguration v = vertex_cells(f);
        CHECK(total_area(v) == doctest::Approx(256.0));
    }
}

TEST_CASE("generation is deterministic in the seed")
{
    for (const char* variant : {"grid", "percolation", "long_range", "big_cell", "two_scale"}) {
        GeneratorSpec s = spec_of(variant, 16, 77);
        s.law = ConductanceLaw::parse("uniform:1:2");
        s.big = 8;
        const CellConfiguration a = generate(s), b = generate(s);
        REQUIRE(a.edges().size() == b.edges().size());
        for (std::size_t k = 0; k < a.edges().size(); ++k)
            CHECK(a.edges()[k].conductance == b.edges()[k].conductance);
        CHECK(a.meta().generator == variant);
        CHECK(a.meta().seed == 77);
    }
}
