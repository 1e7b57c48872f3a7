#include "rwre/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <numeric>
#include <sstream>

namespace rwre {

namespace {

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_number(const std::string& s)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw GeneratorError("bad number in conductance law: '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v))
        throw GeneratorError("bad number in conductance law: '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        out.push_back(item);
    return out;
}

Point default_anchor(const GeneratorSpec& spec)
{
    return spec.anchor ? *spec.anchor : Point(-0.5 * spec.n, -0.5 * spec.n);
}

constexpr std::uint64_t kEdgeStream = 1;
constexpr std::uint64_t kLatticeStream = 2;
constexpr std::uint64_t kShiftStream = 3;

// Tiling by axis-aligned squares on a fine integer grid of spacing h.
// Adjacency: positive-length shared boundary.
struct IntSquare {
    int x, y, s;
};

CellConfiguration tiling_config(const std::vector<IntSquare>& squares, int width, int height, double h,
                                const Point& origin, const Square& window, const ConductanceLaw& law,
                                std::uint64_t seed, bool bounded)
{
    std::vector<std::int32_t> owner(static_cast<std::size_t>(width) * height, -1);
    for (std::size_t q = 0; q < squares.size(); ++q) {
        const IntSquare& s = squares[q];
        for (int y = s.y; y < s.y + s.s; ++y)
            for (int x = s.x; x < s.x + s.s; ++x) {
                auto& o = owner[static_cast<std::size_t>(y) * width + x];
                if (o != -1)
                    throw GeneratorError("tiling squares overlap");
                o = static_cast<std::int32_t>(q);
            }
    }
    std::map<std::pair<std::size_t, std::size_t>, int> shared;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const auto a = owner[static_cast<std::size_t>(y) * width + x];
            if (a < 0)
                continue;
            auto link = [&](int x2, int y2) {
                if (x2 >= width || y2 >= height)
                    return;
                const auto b = owner[static_cast<std::size_t>(y2) * width + x2];
                if (b < 0 || b == a)
                    return;
                ++shared[{std::min<std::size_t>(a, b), std::max<std::size_t>(a, b)}];
            };
            link(x + 1, y);
            link(x, y + 1);
        }
    std::vector<Region> regions;
    regions.reserve(squares.size());
    for (const auto& s : squares)
        regions.push_back(square_region({origin + h * Point(s.x, s.y), h * s.s}));
    CounterRng rng(seed, kEdgeStream);
    std::vector<Edge> edges;
    edges.reserve(shared.size());
    for (const auto& kv : shared)
        edges.push_back({kv.first.first, kv.first.second, law.sample(rng)});
    ConfigOptions opts;
    opts.bounded = bounded;
    return CellConfiguration(std::move(regions), std::move(edges), window, opts);
}

} // namespace

ConductanceLaw ConductanceLaw::parse(const std::string& text)
{
    const auto parts = split(text, ':');
    ConductanceLaw law;
    if (parts.empty())
        throw GeneratorError("empty conductance law");
    if (parts.size() == 1) {
        law.kind = Kind::Constant;
        law.a = law.b = parse_number(parts[0]);
    } else if (parts[0] == "constant" && parts.size() == 2) {
        law.kind = Kind::Constant;
        law.a = law.b = parse_number(parts[1]);
    } else if (parts[0] == "uniform" && parts.size() == 3) {
        law.kind = Kind::Uniform;
        law.a = parse_number(parts[1]);
        law.b = parse_number(parts[2]);
        if (!(law.a <= law.b))
            throw GeneratorError("uniform law needs a <= b");
    } else if (parts[0] == "two" && parts.size() == 4) {
        law.kind = Kind::TwoPoint;
        law.a = parse_number(parts[1]);
        law.b = parse_number(parts[2]);
        law.p = parse_number(parts[3]);
        if (!(law.p >= 0.0 && law.p <= 1.0))
            throw GeneratorError("two-point law needs p in [0,1]");
    } else {
        throw GeneratorError("unknown conductance law '" + text + "'");
    }
    if (!(law.a > 0.0 && law.b > 0.0))
        throw GeneratorError("conductances must be positive");
    return law;
}

std::string ConductanceLaw::to_string() const
{
    switch (kind) {
    case Kind::Constant:
        return "constant:" + fmt(a);
    case Kind::Uniform:
        return "uniform:" + fmt(a) + ":" + fmt(b);
    case Kind::TwoPoint:
        return "two:" + fmt(a) + ":" + fmt(b) + ":" + fmt(p);
    }
    return "constant:1";
}

double ConductanceLaw::sample(CounterRng& rng) const
{
    switch (kind) {
    case Kind::Constant:
        return a;
    case Kind::Uniform:
        return rng.uniform(a, b);
    case Kind::TwoPoint:
        return rng.uniform() < p ? a : b;
    }
    return a;
}

void GeneratorSpec::check() const
{
    if (variant == "split_grid") {
        if (k < 1 || k > 9)
            throw GeneratorError("split_grid needs 1 <= k <= 9");
        return;
    }
    if (variant != "grid" && variant != "percolation" && variant != "long_range" && variant != "big_cell" &&
        variant != "two_scale")
        throw GeneratorError("unknown variant '" + variant + "'");
    if (n < 4)
        throw GeneratorError("window side must be at least 4");
    if (variant == "percolation" && !(p >= 0.0 && p <= 1.0))
        throw GeneratorError("percolation p must lie in [0,1]");
    if (variant == "long_range" && range < 1)
        throw GeneratorError("long_range needs N >= 1");
    if (variant == "big_cell" && (big < 2 || big % 2 != 0 || n % 2 != 0 || big + 4 > n))
        throw GeneratorError("big_cell needs even big >= 2, even n >= big + 4");
    if (variant == "two_scale" && n % 4 != 0)
        throw GeneratorError("two_scale needs n divisible by 4");
}

std::vector<std::pair<std::string, std::string>> GeneratorSpec::params() const
{
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("variant", variant);
    if (variant == "split_grid") {
        out.emplace_back("k", std::to_string(k));
        return out;
    }
    out.emplace_back("n", std::to_string(n));
    if (anchor) {
        out.emplace_back("anchor_x", fmt(anchor->x()));
        out.emplace_back("anchor_y", fmt(anchor->y()));
    }
    if (variant == "grid" || variant == "long_range")
        out.emplace_back("law", law.to_string());
    if (variant == "grid")
        out.emplace_back("shift", shift ? "1" : "0");
    if (variant == "percolation")
        out.emplace_back("p", fmt(p));
    if (variant == "long_range")
        out.emplace_back("range", std::to_string(range));
    if (variant == "big_cell")
        out.emplace_back("big", std::to_string(big));
    return out;
}

CellConfiguration generate(const GeneratorSpec& spec)
{
    spec.check();
    CellConfiguration c;
    if (spec.variant == "grid")
        c = gen_grid(spec);
    else if (spec.variant == "split_grid")
        c = gen_split_grid(spec.k);
    else if (spec.variant == "percolation")
        c = gen_percolation_faces(spec);
    else if (spec.variant == "long_range")
        c = gen_long_range(spec);
    else if (spec.variant == "big_cell")
        c = gen_big_cell(spec);
    else
        c = gen_two_scale(spec);
    c.set_meta({spec.variant, spec.seed, spec.params()});
    return c;
}

CellConfiguration gen_grid(const GeneratorSpec& spec)
{
    if (spec.n < 1)
        throw GeneratorError("grid needs n >= 1");
    const int n = spec.n;
    Point a = default_anchor(spec);
    if (spec.shift) {
        CounterRng rng(spec.seed, kShiftStream);
        const double wx = rng.uniform();
        const double wy = rng.uniform();
        a -= Point(wx, wy);
    }
    auto id = [n](int i, int j) { return static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * j; };
    std::vector<Region> regions;
    regions.reserve(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            regions.push_back(square_region({a + Point(i, j), 1.0}));
    CounterRng rng(spec.seed, kEdgeStream);
    std::vector<Edge> edges;
    edges.reserve(2 * static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (i + 1 < n)
                edges.push_back({id(i, j), id(i + 1, j), spec.law.sample(rng)});
            if (j + 1 < n)
                edges.push_back({id(i, j), id(i, j + 1), spec.law.sample(rng)});
        }
    CellConfiguration c(std::move(regions), std::move(edges), {a, static_cast<double>(n)});

    // Corner lattice: the cells are its faces.
    LatticeData lat;
    const int m = n + 1;
    auto vid = [m](int i, int j) { return static_cast<std::size_t>(i) + static_cast<std::size_t>(m) * j; };
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
            lat.vertices.push_back(a + Point(i, j));
    CounterRng lrng(spec.seed, kLatticeStream);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            if (i + 1 < m)
                lat.edges.push_back({vid(i, j), vid(i + 1, j), spec.law.sample(lrng)});
            if (j + 1 < m)
                lat.edges.push_back({vid(i, j), vid(i, j + 1), spec.law.sample(lrng)});
        }
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            lat.face_vertices.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
    c.set_lattice(std::move(lat));
    return c;
}

CellConfiguration gen_split_grid(int k)
{
    if (k < 1 || k > 9)
        throw GeneratorError("split_grid needs 1 <= k <= 9");
    // Fine grid spacing 2^-(k+1); lower cells are 2x2 fine units.
    const int w = 1 << (k + 1);
    std::vector<IntSquare> squares;
    for (int j = 0; j < (1 << (k - 1)); ++j)
        for (int i = 0; i < (1 << k); ++i)
            squares.push_back({2 * i, 2 * j, 2});
    for (int j = 0; j < (1 << k); ++j)
        for (int i = 0; i < w; ++i)
            squares.push_back({i, w / 2 + j, 1});
    ConductanceLaw unit;
    CellConfiguration c = tiling_config(squares, w, w, 1.0 / w, Point(0.0, 0.0), {Point(0.0, 0.0), 1.0}, unit, 0,
                                        true);
    c.set_meta({"split_grid", 0, {{"variant", "split_grid"}, {"k", std::to_string(k)}}});
    return c;
}

namespace {

struct RingTracer {
    // Directed unit edges keyed by start vertex; direction 0=E 1=N 2=W 3=S.
    std::map<std::int64_t, std::vector<int>> out;
    std::int64_t stride;

    std::int64_t step(std::int64_t v, int d) const
    {
        static const int dx[4] = {1, 0, -1, 0};
        static const int dy[4] = {0, 1, 0, -1};
        return v + dx[d] + stride * dy[d];
    }

    // Successor of an edge arriving at v with direction d: prefer a left
    // turn, then straight, then right. Pinch vertices split into separate rings.
    int next_dir(std::int64_t v, int d) const
    {
        const auto& dirs = out.at(v);
        for (int t : {1, 0, 3}) {
            const int nd = (d + t) % 4;
            if (std::find(dirs.begin(), dirs.end(), nd) != dirs.end())
                return nd;
        }
        throw GeneratorError("broken face boundary");
    }
};

bool ring_contains(const Ring& r, const Point& p)
{
    bool in = false;
    for (std::size_t i = 0, j = r.size() - 1; i < r.size(); j = i++) {
        const Point& a = r[i];
        const Point& b = r[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
            if (p.x() < x)
                in = !in;
        }
    }
    return in;
}

} // namespace

CellConfiguration gen_percolation_faces(const GeneratorSpec& spec)
{
    const int n = spec.n;
    if (n < 1)
        throw GeneratorError("percolation needs n >= 1");
    const Point a = default_anchor(spec);
    const std::size_t np = static_cast<std::size_t>(n) * n;
    auto pid = [n](int i, int j) { return static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * j; };

    // Interior lattice edges: vertical v(i,j) for 0<i<n separates plaquettes
    // (i-1,j),(i,j); horizontal h(i,j) for 0<j<n separates (i,j-1),(i,j).
    CounterRng rng(spec.seed, kEdgeStream);
    std::vector<char> vopen(static_cast<std::size_t>(n + 1) * n, 0), hopen(static_cast<std::size_t>(n + 1) * n, 0);
    for (int j = 0; j < n; ++j)
        for (int i = 1; i < n; ++i)
            vopen[static_cast<std::size_t>(i) + static_cast<std::size_t>(n + 1) * j] = rng.uniform() < spec.p;
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < n; ++i)
            hopen[static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * j] = rng.uniform() < spec.p;
    auto vo = [&](int i, int j) { return vopen[static_cast<std::size_t>(i) + static_cast<std::size_t>(n + 1) * j] != 0; };
    auto ho = [&](int i, int j) { return hopen[static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * j] != 0; };

    std::vector<std::size_t> parent(np);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](std::size_t x, std::size_t y) {
        x = find(x);
        y = find(y);
        if (x != y)
            parent[std::max(x, y)] = std::min(x, y);
    };
    for (int j = 0; j < n; ++j)
        for (int i = 1; i < n; ++i)
            if (!vo(i, j))
                unite(pid(i - 1, j), pid(i, j));
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (!ho(i, j))
                unite(pid(i, j - 1), pid(i, j));

    std::vector<std::size_t> face_of(np);
    std::map<std::size_t, std::size_t> root_face;
    for (std::size_t q = 0; q < np; ++q) {
        const std::size_t r = find(q);
        auto it = root_face.find(r);
        if (it == root_face.end())
            it = root_face.emplace(r, root_face.size()).first;
        face_of[q] = it->second;
    }
    const std::size_t nf = root_face.size();
    if (nf == 0)
        throw GeneratorError("no faces");

    // Open edges between distinct faces add unit conductance; an open edge
    // with the same face on both sides is a dangling edge and carries none.
    std::map<std::pair<std::size_t, std::size_t>, double> cond;
    auto add = [&](std::size_t f, std::size_t g) {
        if (f != g)
            cond[{std::min(f, g), std::max(f, g)}] += 1.0;
    };
    for (int j = 0; j < n; ++j)
        for (int i = 1; i < n; ++i)
            if (vo(i, j))
                add(face_of[pid(i - 1, j)], face_of[pid(i, j)]);
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (ho(i, j))
                add(face_of[pid(i, j - 1)], face_of[pid(i, j)]);

    // Boundary edges of each face, counterclockwise around its plaquettes.
    const std::int64_t stride = n + 1;
    std::vector<RingTracer> tracers(nf, RingTracer{{}, stride});
    auto vkey = [stride](int i, int j) { return static_cast<std::int64_t>(i) + stride * j; };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const std::size_t f = face_of[pid(i, j)];
            auto& t = tracers[f].out;
            if (j == 0 || face_of[pid(i, j - 1)] != f)
                t[vkey(i, j)].push_back(0);
            if (i == n - 1 || face_of[pid(i + 1, j)] != f)
                t[vkey(i + 1, j)].push_back(1);
            if (j == n - 1 || face_of[pid(i, j + 1)] != f)
                t[vkey(i + 1, j + 1)].push_back(2);
            if (i == 0 || face_of[pid(i - 1, j)] != f)
                t[vkey(i, j + 1)].push_back(3);
        }

    auto to_point = [&](std::int64_t v) -> Point {
        return a + Point(static_cast<double>(v % stride), static_cast<double>(v / stride));
    };
    std::vector<Region> regions(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        const RingTracer& tr = tracers[f];
        std::map<std::pair<std::int64_t, int>, char> used;
        std::vector<Ring> outers, holes;
        std::vector<double> outer_area;
        for (const auto& [v0, dirs] : tr.out)
            for (int d0 : dirs) {
                if (used.count({v0, d0}))
                    continue;
                std::vector<std::pair<std::int64_t, int>> walk;
                std::int64_t v = v0;
                int d = d0;
                do {
                    used[{v, d}] = 1;
                    walk.emplace_back(v, d);
                    v = tr.step(v, d);
                    d = tr.next_dir(v, d);
                } while (!(v == v0 && d == d0));
                // Keep only corners (direction changes).
                Ring ring;
                long long twice_area = 0;
                for (std::size_t s = 0; s < walk.size(); ++s) {
                    const int prev = walk[(s + walk.size() - 1) % walk.size()].second;
                    if (walk[s].second != prev)
                        ring.push_back(to_point(walk[s].first));
                    const std::int64_t p = walk[s].first;
                    const std::int64_t q = tr.step(p, walk[s].second);
                    twice_area += (p % stride) * (q / stride) - (q % stride) * (p / stride);
                }
                if (twice_area > 0) {
                    outers.push_back(std::move(ring));
                    outer_area.push_back(0.5 * static_cast<double>(twice_area));
                } else {
                    holes.push_back(std::move(ring));
                }
            }
        Region& r = regions[f];
        for (auto& o : outers)
            r.components.push_back({std::move(o), {}});
        for (auto& h : holes) {
            // A point just left of the hole's first unit edge lies inside a
            // plaquette of this face, off every lattice line.
            const Point dir = (h[1] - h[0]).normalized();
            const Point mid = h[0] + 0.5 * dir + 0.25 * Point(-dir.y(), dir.x());
            std::size_t best = outers.size();
            for (std::size_t o = 0; o < r.components.size(); ++o)
                if (ring_contains(r.components[o].outer, mid) &&
                    (best == outers.size() || outer_area[o] < outer_area[best]))
                    best = o;
            if (best == outers.size())
                throw GeneratorError("face hole outside every outer ring");
            r.components[best].holes.push_back(std::move(h));
        }
    }
    std::vector<Edge> edges;
    for (const auto& kv : cond)
        edges.push_back({kv.first.first, kv.first.second, kv.second});
    ConfigOptions opts;
    opts.check_simple = false;
    CellConfiguration c(std::move(regions), std::move(edges), {a, static_cast<double>(n)}, opts);
    return c;
}

CellConfiguration gen_long_range(const GeneratorSpec& spec)
{
    const int n = spec.n;
    const int N = spec.range;
    if (N < 1)
        throw GeneratorError("long_range needs N >= 1");
    const Point a = default_anchor(spec);
    std::vector<std::pair<int, int>> offsets;
    for (int dy = -N; dy <= N; ++dy)
        for (int dx = -N; dx <= N; ++dx)
            if ((dx != 0 || dy != 0) && dx * dx + dy * dy <= N * N)
                offsets.emplace_back(dx, dy);
    auto id = [n](int i, int j) { return static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * j; };
    auto inside = [n](int i, int j) { return i >= 0 && j >= 0 && i < n && j < n; };
    // Slivers run from the square's boundary to the midpoint of the segment,
    // so the two halves of each connection touch end to end.
    constexpr double kWidth = 1e-10;
    std::vector<Region> regions;
    regions.reserve(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Point x = a + Point(i + 0.5, j + 0.5);
            Region r = square_region({x - Point(0.25, 0.25), 0.5});
            for (auto [dx, dy] : offsets) {
                if (!inside(i + dx, j + dy))
                    continue;
                const double len = std::hypot(dx, dy);
                const Point u(dx / len, dy / len);
                const Point nrm(-u.y(), u.x());
                const double t0 = 0.25 / std::max(std::abs(u.x()), std::abs(u.y()));
                const double t1 = 0.5 * len;
                if (t1 <= t0)
                    continue;
                const Point h = 0.5 * kWidth * nrm;
                r.components.push_back({{x + t0 * u - h, x + t1 * u - h, x + t1 * u + h, x + t0 * u + h}, {}});
            }
            regions.push_back(std::move(r));
        }
    CounterRng rng(spec.seed, kEdgeStream);
    std::vector<Edge> edges;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            for (auto [dx, dy] : offsets) {
                if (dy < 0 || (dy == 0 && dx < 0) || !inside(i + dx, j + dy))
                    continue;
                edges.push_back({id(i, j), id(i + dx, j + dy), spec.law.sample(rng)});
            }
    ConfigOptions opts;
    opts.check_simple = false;
    return CellConfiguration(std::move(regions), std::move(edges), {a, static_cast<double>(n)}, opts);
}

CellConfiguration gen_big_cell(const GeneratorSpec& spec)
{
    const int n = spec.n;
    const int b = spec.big;
    if (b < 2 || b % 2 || n % 2 || b + 4 > n)
        throw GeneratorError("big_cell needs even big >= 2, even n >= big + 4");
    const Point a = default_anchor(spec);
    const int lo = (n - b) / 2;
    std::vector<IntSquare> squares;
    squares.push_back({lo, lo, b});
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (!(i >= lo && i < lo + b && j >= lo && j < lo + b))
                squares.push_back({i, j, 1});
    return tiling_config(squares, n, n, 1.0, a, {a, static_cast<double>(n)}, spec.law, spec.seed, false);
}

CellConfiguration gen_two_scale(const GeneratorSpec& spec)
{
    const int n = spec.n;
    if (n % 4)
        throw GeneratorError("two_scale needs n divisible by 4");
    const Point a = default_anchor(spec);
    std::vector<IntSquare> squares;
    for (int j = 0; j < n; j += 2)
        for (int i = 0; i < n / 2; i += 2)
            squares.push_back({i, j, 2});
    for (int j = 0; j < n; ++j)
        for (int i = n / 2; i < n; ++i)
            squares.push_back({i, j, 1});
    return tiling_config(squares, n, n, 1.0, a, {a, static_cast<double>(n)}, spec.law, spec.seed, false);
}

CellConfiguration vertex_cells(const CellConfiguration& faces)
{
    const auto& lat = faces.lattice();
    if (!lat || lat->face_vertices.size() != faces.size())
        throw GeneratorError("vertex_cells needs a face configuration carrying its lattice");
    const std::size_t nv = lat->vertices.size();
    const auto& V = lat->vertices;
    auto mid = [&](std::size_t u, std::size_t v) {
        if (u > v)
            std::swap(u, v);
        return Point(0.5 * (V[u] + V[v]));
    };
    using Key = std::pair<std::uint64_t, std::uint64_t>;
    auto key = [](const Point& p) {
        std::uint64_t x, y;
        const double px = p.x() + 0.0, py = p.y() + 0.0;
        std::memcpy(&x, &px, 8);
        std::memcpy(&y, &py, 8);
        return Key{x, y};
    };
    // Directed boundary edges of each vertex's quads; shared edges cancel.
    std::vector<std::map<std::pair<Key, Key>, int>> dir_edges(nv);
    std::vector<std::map<Key, Point>> coords(nv);
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const auto& cyc = lat->face_vertices[f];
        const std::size_t k = cyc.size();
        if (k < 3)
            throw GeneratorError("face with fewer than 3 vertices");
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j)
                if (cyc[i] == cyc[j])
                    throw GeneratorError("vertex_cells supports only simple face cycles");
        const Point c = faces.centroid(f);
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t v = cyc[i];
            if (v >= nv)
                throw GeneratorError("face references unknown vertex");
            const Point quad[4] = {c, mid(cyc[(i + k - 1) % k], v), V[v], mid(v, cyc[(i + 1) % k])};
            for (int s = 0; s < 4; ++s) {
                const Key p = key(quad[s]);
                const Key q = key(quad[(s + 1) % 4]);
                coords[v][p] = quad[s];
                auto rev = dir_edges[v].find({q, p});
                if (rev != dir_edges[v].end()) {
                    if (--rev->second == 0)
                        dir_edges[v].erase(rev);
                } else {
                    ++dir_edges[v][{p, q}];
                }
            }
        }
    }
    std::vector<std::size_t> cell_of(nv, SIZE_MAX);
    std::vector<Region> regions;
    std::vector<std::int64_t> ids;
    for (std::size_t v = 0; v < nv; ++v) {
        if (dir_edges[v].empty())
            continue;
        std::map<Key, Key> next;
        for (const auto& [e, count] : dir_edges[v]) {
            if (count != 1 || !next.emplace(e.first, e.second).second)
                throw GeneratorError("vertex_cells: non-simple vertex star");
        }
        Region r;
        std::vector<Ring> holes;
        while (!next.empty()) {
            Ring ring;
            const Key start = next.begin()->first;
            Key cur = start;
            do {
                auto it = next.find(cur);
                if (it == next.end())
                    throw GeneratorError("vertex_cells: open vertex star boundary");
                ring.push_back(coords[v].at(cur));
                cur = it->second;
                next.erase(it);
            } while (cur != start);
            if (ring_signed_area(ring) > 0.0)
                r.components.push_back({std::move(ring), {}});
            else
                holes.push_back(std::move(ring));
        }
        if (r.components.size() != 1)
            throw GeneratorError("vertex_cells: vertex star is not a single polygon");
        r.components[0].holes = std::move(holes);
        cell_of[v] = regions.size();
        regions.push_back(std::move(r));
        ids.push_back(static_cast<std::int64_t>(v));
    }
    std::vector<Edge> edges;
    for (const Edge& e : lat->edges) {
        if (cell_of[e.a] == SIZE_MAX || cell_of[e.b] == SIZE_MAX)
            continue;
        edges.push_back({cell_of[e.a], cell_of[e.b], e.conductance});
    }
    ConfigOptions opts;
    opts.bounded = faces.bounded();
    CellConfiguration c(std::move(regions), std::move(edges), faces.window(), opts, std::move(ids));
    GeneratorMeta meta = faces.meta();
    meta.params.emplace_back("vertex_cells", "1");
    c.set_meta(meta);
    return c;
}

} // namespace rwre
