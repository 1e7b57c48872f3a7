#include "rwre/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rwre {

namespace {

constexpr std::uint64_t kParentStream = 0x70a7e47ULL;
constexpr std::uint64_t kSampleStream = 0x5a3b1eULL;
constexpr int kSlots = 2 * DyadicSystem2D::kMaxExponent + 3;

int slot(int k) { return k + DyadicSystem2D::kMaxExponent + 1; }

std::int64_t floor_index(double x)
{
    const double f = std::floor(x);
    if (!(std::abs(f) < 9.0e18))
        throw DyadicError("point too far from the origin for this level");
    return static_cast<std::int64_t>(f);
}

} // namespace

DyadicSystem2D::DyadicSystem2D(double s, const Point& w, std::uint64_t seed) : s_(s), w_(w), seed_(seed)
{
    if (!(s >= 0.0 && s < 1.0))
        throw DyadicError("s must lie in [0,1)");
    const double l0 = std::exp2(s);
    if (!(w.x() >= 0.0 && w.y() >= 0.0 && w.x() < l0 && w.y() < l0))
        throw DyadicError("w must lie in [0, 2^s)^2");
    anchors_.assign(kSlots, Point::Zero());
    corners_.assign(kSlots, -1);
    known_.assign(kSlots, 0);
    anchors_[slot(0)] = -w_;
    known_[slot(0)] = 1;
}

DyadicSystem2D::DyadicSystem2D(const DyadicSystem2D& o) : s_(o.s_), w_(o.w_), seed_(o.seed_)
{
    std::lock_guard<std::mutex> lock(o.mutex_);
    anchors_ = o.anchors_;
    corners_ = o.corners_;
    known_ = o.known_;
}

DyadicSystem2D& DyadicSystem2D::operator=(const DyadicSystem2D& o)
{
    if (this == &o)
        return *this;
    std::scoped_lock lock(mutex_, o.mutex_);
    s_ = o.s_;
    w_ = o.w_;
    seed_ = o.seed_;
    anchors_ = o.anchors_;
    corners_ = o.corners_;
    known_ = o.known_;
    return *this;
}

void DyadicSystem2D::check_level(int k) const
{
    if (std::abs(s_ + k) > kMaxExponent || std::abs(k) > kMaxExponent)
        throw DyadicError("dyadic level out of range: " + std::to_string(k));
}

double DyadicSystem2D::side(int k) const
{
    check_level(k);
    return std::ldexp(std::exp2(s_), k);
}

void DyadicSystem2D::extend_to(int k) const
{
    // Caller holds mutex_.
    if (known_[slot(k)])
        return;
    if (k > 0) {
        extend_to(k - 1);
        // The parent choice at level k depends only on (seed, k).
        const int c = static_cast<int>(CounterRng::at(CounterRng::stream_key(seed_, kParentStream),
                                                      static_cast<std::uint64_t>(k)) >> 62);
        const double l = std::ldexp(std::exp2(s_), k - 1);
        anchors_[slot(k)] = anchors_[slot(k - 1)] - l * Point(c & 1, c >> 1);
        corners_[slot(k)] = c;
    } else {
        extend_to(k + 1);
        // Child of S_{k+1} containing the origin (half-open).
        const double l = std::ldexp(std::exp2(s_), k);
        const Point a = anchors_[slot(k + 1)];
        const int cx = (0.0 >= a.x() + l) ? 1 : 0;
        const int cy = (0.0 >= a.y() + l) ? 1 : 0;
        anchors_[slot(k)] = a + l * Point(cx, cy);
        corners_[slot(k + 1)] = cx | (cy << 1);
    }
    known_[slot(k)] = 1;
}

int DyadicSystem2D::child_corner(int k) const
{
    check_level(k);
    check_level(k - 1);
    std::lock_guard<std::mutex> lock(mutex_);
    extend_to(k);
    extend_to(k - 1);
    return corners_[slot(k)];
}

Point DyadicSystem2D::level_anchor(int k) const
{
    check_level(k);
    std::lock_guard<std::mutex> lock(mutex_);
    extend_to(k);
    return anchors_[slot(k)];
}

Square DyadicSystem2D::origin_square(int k) const { return {level_anchor(k), side(k)}; }

Square DyadicSystem2D::square(const DyadicSquare& q) const
{
    const double l = side(q.level);
    return {level_anchor(q.level) + l * Point(static_cast<double>(q.i), static_cast<double>(q.j)), l};
}

DyadicSquare DyadicSystem2D::containing(const Point& z, int k) const
{
    const double l = side(k);
    const Point a = level_anchor(k);
    DyadicSquare q{k, floor_index((z.x() - a.x()) / l), floor_index((z.y() - a.y()) / l)};
    // Settle rounding so that the half-open test on the returned square holds.
    for (int it = 0; it < 4; ++it) {
        const Square s = square(q);
        if (z.x() < s.anchor.x())
            --q.i;
        else if (z.x() >= s.anchor.x() + l)
            ++q.i;
        else if (z.y() < s.anchor.y())
            --q.j;
        else if (z.y() >= s.anchor.y() + l)
            ++q.j;
        else
            break;
    }
    return q;
}

DyadicSquare DyadicSystem2D::parent(const DyadicSquare& q) const
{
    const int c = child_corner(q.level + 1);
    auto half = [](std::int64_t v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); };
    return {q.level + 1, half(q.i + (c & 1)), half(q.j + (c >> 1))};
}

std::array<DyadicSquare, 4> DyadicSystem2D::children(const DyadicSquare& q) const
{
    const int c = child_corner(q.level);
    const std::int64_t bi = 2 * q.i - (c & 1);
    const std::int64_t bj = 2 * q.j - (c >> 1);
    const int k = q.level - 1;
    return {DyadicSquare{k, bi, bj}, DyadicSquare{k, bi + 1, bj}, DyadicSquare{k, bi, bj + 1},
            DyadicSquare{k, bi + 1, bj + 1}};
}

int DyadicSystem2D::level_at_least(double x) const
{
    if (!(x > 0.0))
        throw DyadicError("side must be positive");
    int k = static_cast<int>(std::ceil(std::log2(x) - s_));
    while (side(k) < x)
        ++k;
    while (side(k - 1) >= x)
        --k;
    return k;
}

DyadicSystem2D sample_uniform_2d(std::uint64_t seed)
{
    CounterRng rng(seed, kSampleStream);
    const double s = rng.uniform();
    const double l = std::exp2(s);
    Point w(l * rng.uniform(), l * rng.uniform());
    return DyadicSystem2D(s, w, seed);
}

Square origin_square(const DyadicSystem2D& d, int k) { return d.origin_square(k); }

Square containing_square(const DyadicSystem2D& d, const Point& z, int k) { return d.square(d.containing(z, k)); }

DyadicSystem1D::DyadicSystem1D(double s, double w, std::uint64_t seed) : s_(s), w_(w), seed_(seed)
{
    if (!(s >= 0.0 && s < 1.0))
        throw DyadicError("s must lie in [0,1)");
    if (!(w >= 0.0 && w < std::exp2(s)))
        throw DyadicError("w must lie in [0, 2^s)");
    starts_[0] = -w;
}

double DyadicSystem1D::length(int k) const
{
    if (std::abs(s_ + k) > DyadicSystem2D::kMaxExponent)
        throw DyadicError("dyadic level out of range");
    return std::ldexp(std::exp2(s_), k);
}

double DyadicSystem1D::start(int k) const
{
    (void)length(k);
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = starts_.find(k);
    if (it != starts_.end())
        return it->second;
    if (k > 0) {
        int j = starts_.rbegin()->first;
        double a = starts_.rbegin()->second;
        if (j < 0) {
            j = 0;
            a = starts_.at(0);
        }
        const std::uint64_t key = CounterRng::stream_key(seed_, kParentStream + 1);
        for (int level = j + 1; level <= k; ++level) {
            const int c = static_cast<int>(CounterRng::at(key, static_cast<std::uint64_t>(level)) >> 63);
            a -= c * std::ldexp(std::exp2(s_), level - 1);
            starts_[level] = a;
        }
        return a;
    }
    int j = starts_.begin()->first;
    double a = starts_.begin()->second;
    for (int level = j - 1; level >= k; --level) {
        const double l = std::ldexp(std::exp2(s_), level);
        if (0.0 >= a + l)
            a += l;
        starts_[level] = a;
    }
    return a;
}

int DyadicSystem1D::level_at_most(double a) const
{
    if (!(a > 0.0))
        throw DyadicError("interval length must be positive");
    int k = static_cast<int>(std::floor(std::log2(a) - s_));
    while (length(k) > a)
        --k;
    while (length(k + 1) <= a)
        ++k;
    return k;
}

DyadicSystem1D sample_uniform_1d(std::uint64_t seed)
{
    CounterRng rng(seed, kSampleStream + 1);
    const double s = rng.uniform();
    const double w = std::exp2(s) * rng.uniform();
    return DyadicSystem1D(s, w, seed);
}

double fractional_mass(const CellConfiguration& c, const Square& s)
{
    double m = 0.0;
    for (std::size_t i : c.candidates(s.box()))
        m += clipped_area(c.region(i), s) / c.area(i);
    return m;
}

namespace {

class MassCache {
public:
    MassCache(const CellConfiguration& c, const DyadicSystem2D& d) : c_(c), d_(d) {}

    double operator()(const DyadicSquare& q)
    {
        auto it = cache_.find(q);
        if (it != cache_.end())
            return it->second;
        const double m = fractional_mass(c_, d_.square(q));
        cache_.emplace(q, m);
        return m;
    }

private:
    const CellConfiguration& c_;
    const DyadicSystem2D& d_;
    std::map<DyadicSquare, double> cache_;
};

bool certified(const CellConfiguration& c, const Square& s)
{
    return c.bounded() || c.window().contains_square(s, kGeomTol);
}

bool covers_window(const CellConfiguration& c, const Square& s)
{
    return s.contains_square(c.window(), 0.0);
}

// Climb from q (mass <= m) to the largest ancestor with mass <= m.
MassSquare climb(const CellConfiguration& c, const DyadicSystem2D& d, DyadicSquare q, double m, MassCache& mass)
{
    for (;;) {
        const Square s = d.square(q);
        if (!certified(c, s))
            throw DyadicError("window too small for mass " + std::to_string(m));
        if (c.bounded() && covers_window(c, s))
            return {q, s, mass(q), false, true};
        const DyadicSquare p = d.parent(q);
        if (mass(p) > m)
            return {q, s, mass(q), false, false};
        q = p;
    }
}

int start_level(const CellConfiguration& c, const DyadicSystem2D& d, const Point& z, double m)
{
    double a = 0.0;
    if (auto h = c.cell_containing(z))
        a = c.area(*h);
    else
        throw DyadicError("point lies outside every cell");
    const double target = std::sqrt(m * a);
    return std::clamp(static_cast<int>(std::floor(std::log2(target) - d.s())), -DyadicSystem2D::kMaxExponent + 2,
                      DyadicSystem2D::kMaxExponent - 2);
}

MassSquare mass_square_cached(const CellConfiguration& c, const DyadicSystem2D& d, const Point& z, double m,
                              const MassOptions& opts, MassCache& mass)
{
    if (!(m > 0.0))
        throw DyadicError("mass threshold must be positive");
    const int k0 = start_level(c, d, z, m);
    const int floor_level = std::max(k0 - opts.floor_depth, -DyadicSystem2D::kMaxExponent + 1);
    DyadicSquare q = d.containing(z, k0);
    if (mass(q) <= m)
        return climb(c, d, q, m, mass);
    while (q.level > floor_level) {
        q = d.containing(z, q.level - 1);
        if (mass(q) <= m)
            return climb(c, d, q, m, mass);
    }
    const Square s = d.square(q);
    return {q, s, mass(q), true, false};
}

} // namespace

MassSquare mass_square(const CellConfiguration& c, const DyadicSystem2D& d, const Point& z, double m,
                       MassOptions opts)
{
    MassCache mass(c, d);
    return mass_square_cached(c, d, z, m, opts, mass);
}

std::vector<MassSquare> partition(const CellConfiguration& c, const DyadicSystem2D& d, double m,
                                  const Square& region, MassOptions opts)
{
    if (!(m > 0.0))
        throw DyadicError("mass threshold must be positive");
    MassCache mass(c, d);
    std::map<DyadicSquare, MassSquare> found;
    const int top = d.level_at_least(region.side);
    const Point a = d.level_anchor(top);
    const double l = d.side(top);
    const Box rb = region.box();
    const std::int64_t i0 = floor_index((rb.lo.x() - a.x()) / l);
    const std::int64_t i1 = static_cast<std::int64_t>(std::ceil((rb.hi.x() - a.x()) / l)) - 1;
    const std::int64_t j0 = floor_index((rb.lo.y() - a.y()) / l);
    const std::int64_t j1 = static_cast<std::int64_t>(std::ceil((rb.hi.y() - a.y()) / l)) - 1;

    // Floor level relative to the smallest cell the region touches.
    double min_area = std::numeric_limits<double>::infinity();
    for (std::size_t h : c.cells_meeting(region))
        min_area = std::min(min_area, c.area(h));
    if (!std::isfinite(min_area))
        throw DyadicError("region meets no cells");
    const int floor_level =
        std::max(static_cast<int>(std::floor(std::log2(std::sqrt(m * min_area)) - d.s())) - opts.floor_depth,
                 -DyadicSystem2D::kMaxExponent + 1);

    auto meets_interior = [&](const Square& s) {
        const Box b = s.box();
        return b.lo.x() < rb.hi.x() && rb.lo.x() < b.hi.x() && b.lo.y() < rb.hi.y() && rb.lo.y() < b.hi.y();
    };
    std::vector<DyadicSquare> stack;
    for (std::int64_t i = i0; i <= i1; ++i)
        for (std::int64_t j = j0; j <= j1; ++j)
            stack.push_back({top, i, j});
    while (!stack.empty()) {
        const DyadicSquare q = stack.back();
        stack.pop_back();
        const Square s = d.square(q);
        if (!meets_interior(s))
            continue;
        if (mass(q) <= m) {
            const MassSquare ms = climb(c, d, q, m, mass);
            found.emplace(ms.key, ms);
            continue;
        }
        if (q.level <= floor_level) {
            found.emplace(q, MassSquare{q, s, mass(q), true, false});
            continue;
        }
        for (const auto& ch : d.children(q))
            stack.push_back(ch);
    }
    std::vector<MassSquare> out;
    out.reserve(found.size());
    for (auto& kv : found)
        out.push_back(kv.second);
    return out;
}

MeanEstimate ergodic_average(const CellConfiguration& c, const DyadicSystem2D& d, const PointFunctional& f, int k,
                             std::size_t n_samples, std::uint64_t seed)
{
    if (n_samples == 0)
        throw DyadicError("need at least one sample");
    const Square s = d.origin_square(k);
    CounterRng rng(seed, 0xe60d1cULL);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const Point z = s.anchor + s.side * Point(rng.uniform(), rng.uniform());
        const double v = f(c, d, z);
        sum += v;
        sum2 += v * v;
    }
    const double n = static_cast<double>(n_samples);
    const double mean = sum / n;
    const double var = n > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0)) : 0.0;
    return {mean, std::sqrt(var / n), n_samples};
}

BalanceReport mass_transport_check(const EnvironmentSampler& sampler, const TransportRule& rule, std::size_t n_envs,
                                   std::size_t n_points, double radius, std::uint64_t seed)
{
    if (n_envs < 2 || n_points == 0 || !(radius > 0.0))
        throw DyadicError("mass transport check needs n_envs >= 2, n_points >= 1, radius > 0");
    const double disk = std::numbers::pi * radius * radius;
    std::vector<double> outs(n_envs), ins(n_envs);
    bool warn = false;
    for (std::size_t e = 0; e < n_envs; ++e) {
        const PlacedEnvironment env = sampler(e);
        CounterRng rng(seed, 0x3a55ULL + e);
        double so = 0.0, si = 0.0;
        const Point zero(0.0, 0.0);
        for (std::size_t p = 0; p < n_points; ++p) {
            const double rr = radius * std::sqrt(rng.uniform());
            const double th = 2.0 * std::numbers::pi * rng.uniform();
            const Point w(rr * std::cos(th), rr * std::sin(th));
            const double fo = rule.evaluate(env, zero, w);
            const double fi = rule.evaluate(env, w, zero);
            if (rr > 0.95 * radius && (fo != 0.0 || fi != 0.0))
                warn = true;
            so += fo;
            si += fi;
        }
        outs[e] = disk * so / static_cast<double>(n_points);
        ins[e] = disk * si / static_cast<double>(n_points);
    }
    auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
        const double n = static_cast<double>(v.size());
        double s = 0.0;
        for (double x : v)
            s += x;
        mean = s / n;
        double ss = 0.0;
        for (double x : v)
            ss += (x - mean) * (x - mean);
        se = std::sqrt(ss / (n - 1.0) / n);
    };
    BalanceReport rep;
    mean_se(outs, rep.out_mean, rep.out_se);
    mean_se(ins, rep.in_mean, rep.in_se);
    std::vector<double> diff(n_envs);
    for (std::size_t e = 0; e < n_envs; ++e)
        diff[e] = outs[e] - ins[e];
    double dm = 0.0;
    mean_se(diff, dm, rep.diff_se);
    rep.z_score = rep.diff_se > 0.0 ? dm / rep.diff_se : (dm == 0.0 ? 0.0 : std::copysign(INFINITY, dm));
    rep.samples = n_envs * n_points;
    rep.support_warning = warn;
    return rep;
}

double covariance_defect(const TransportRule& rule, const PlacedEnvironment& env, double C, const Point& z,
                         const Point& w0, const Point& w1)
{
    const PlacedEnvironment t = env.transformed(C, z);
    const double lhs = rule.evaluate(t, C * (w0 - z), C * (w1 - z));
    const double rhs = rule.evaluate(env, w0, w1) / (C * C);
    return std::abs(lhs - rhs);
}

EnvironmentSampler uniform_placement(std::shared_ptr<const CellConfiguration> base, const Square& inner,
                                     bool normalize, std::uint64_t seed)
{
    return [base, inner, normalize, seed](std::uint64_t index) {
        CounterRng rng(seed, 0x91ac3ULL + index);
        for (;;) {
            const Point z = inner.anchor + inner.side * Point(rng.uniform(), rng.uniform());
            const auto h = base->cell_containing(z);
            if (!h)
                continue;
            const double scale = normalize ? 1.0 / std::sqrt(base->area(*h)) : 1.0;
            return PlacedEnvironment{base, z, scale};
        }
    };
}

TransportRule identity_transport()
{
    return {"identity", [](const PlacedEnvironment& env, const Point& w0, const Point& w1) {
                const auto h = env.cell_at(w0);
                if (!h)
                    return 0.0;
                if (!point_in_region(env.base->region(*h), env.to_base(w1)))
                    return 0.0;
                return 1.0 / env.area(*h);
            }};
}

TransportRule right_neighbor_transport()
{
    return {"right_neighbor", [](const PlacedEnvironment& env, const Point& w0, const Point& w1) {
                const auto h = env.cell_at(w0);
                if (!h)
                    return 0.0;
                const CellConfiguration& c = *env.base;
                std::optional<std::size_t> best;
                double best_dx = 0.0;
                for (auto it = c.neighbors_begin(*h); it != c.neighbors_end(*h); ++it) {
                    const double dx = c.centroid(it->cell).x() - c.centroid(*h).x();
                    if (dx > best_dx) {
                        best_dx = dx;
                        best = it->cell;
                    }
                }
                if (!best || !point_in_region(c.region(*best), env.to_base(w1)))
                    return 0.0;
                return 1.0 / env.area(*best);
            }};
}

TransportRule disk_transport(bool covariant)
{
    return {covariant ? "disk" : "disk_unnormalized",
            [covariant](const PlacedEnvironment& env, const Point& w0, const Point& w1) {
                const auto h = env.cell_at(w0);
                if (!h)
                    return 0.0;
                const double a = env.area(*h);
                if ((w1 - w0).squaredNorm() > a)
                    return 0.0;
                return covariant ? 1.0 / (std::numbers::pi * a) : 1.0 / std::numbers::pi;
            }};
}

} // namespace rwre
