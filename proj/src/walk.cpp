#include "rwre/walk.hpp"
#include "rwre/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <unordered_map>

namespace rwre {

std::size_t WalkTrace::cell_at(double t) const
{
    if (cells.empty() || t < jump_times.front() || t >= end_time)
        throw WalkError("time outside the trace");
    const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    return cells[static_cast<std::size_t>(it - jump_times.begin()) - 1];
}

std::size_t step(const CellConfiguration& c, std::size_t cell, CounterRng& rng)
{
    const Neighbor* b = c.neighbors_begin(cell);
    const Neighbor* e = c.neighbors_end(cell);
    if (b == e)
        throw WalkError("isolated cell " + std::to_string(c.id(cell)));
    const double u = rng.uniform() * c.pi(cell);
    double acc = 0.0;
    for (const Neighbor* it = b; it != e; ++it) {
        acc += it->conductance;
        if (u < acc)
            return it->cell;
    }
    return (e - 1)->cell;
}

WalkTrace run_walk(const CellConfiguration& c, std::size_t start, const WalkLimits& limits, std::uint64_t seed,
                   bool stop_on_boundary, std::uint64_t stream)
{
    if (start >= c.size())
        throw WalkError("start cell out of range");
    CounterRng rng(seed, stream);
    WalkTrace tr;
    tr.theta = rng.uniform() * c.holding_time(start);
    std::size_t cur = start;
    double t = -tr.theta;
    tr.cells.push_back(cur);
    tr.jump_times.push_back(t);
    for (std::size_t n = 0;; ++n) {
        if (stop_on_boundary && c.frozen(cur)) {
            tr.truncated = true;
            tr.end_time = t;
            break;
        }
        const double next = t + c.holding_time(cur);
        if (next > limits.horizon || n >= limits.max_steps) {
            tr.end_time = next;
            break;
        }
        cur = step(c, cur, rng);
        t = next;
        tr.cells.push_back(cur);
        tr.jump_times.push_back(t);
    }
    return tr;
}

TimedCurve embed_walk(const WalkTrace& trace, const Embedding& e)
{
    TimedCurve cv;
    for (std::size_t j = 0; j < trace.cells.size(); ++j) {
        if (trace.cells[j] >= e.size())
            throw WalkError("embedding does not cover a visited cell");
        cv.times.push_back(trace.jump_times[j]);
        cv.points.push_back(e[trace.cells[j]]);
    }
    return cv;
}

Point uniform_point_in_cell(const CellConfiguration& c, std::size_t cell, CounterRng& rng)
{
    const Box b = c.bbox(cell);
    for (int attempt = 0; attempt < 100000; ++attempt) {
        const Point p(rng.uniform(b.lo.x(), b.hi.x()), rng.uniform(b.lo.y(), b.hi.y()));
        if (point_in_region(c.region(cell), p))
            return p;
    }
    throw WalkError("could not sample a point in cell " + std::to_string(c.id(cell)));
}

TimedCurve embed_walk_uniform(const CellConfiguration& c, const WalkTrace& trace, std::uint64_t seed)
{
    CounterRng rng(seed, 0x91cce7ULL);
    TimedCurve cv;
    for (std::size_t j = 0; j < trace.cells.size(); ++j) {
        cv.times.push_back(trace.jump_times[j]);
        cv.points.push_back(uniform_point_in_cell(c, trace.cells[j], rng));
    }
    return cv;
}

double quadratic_variation(const WalkTrace& trace, const Embedding& e, const Point& v, double S, double T)
{
    if (T > trace.end_time)
        throw WalkError("horizon exceeds the trace");
    double q = 0.0;
    for (std::size_t j = 1; j < trace.cells.size() && trace.jump_times[j] <= T; ++j) {
        if (trace.jump_times[j] <= S)
            continue;
        const double d = v.dot(e[trace.cells[j]] - e[trace.cells[j - 1]]);
        q += d * d;
    }
    return q;
}

double quadratic_variation(const WalkTrace& trace, const Embedding& e, const Point& v, double T)
{
    return quadratic_variation(trace, e, v, -INFINITY, T);
}

SigmaEstimate estimate_sigma(const CellConfiguration& c, const Embedding& e, std::size_t n_walks, double T,
                             std::uint64_t seed, const SigmaOptions& opts)
{
    if (n_walks < 2 || !(T > 0.0))
        throw WalkError("estimate_sigma needs n_walks >= 2 and T > 0");
    if (e.size() != c.size())
        throw WalkError("embedding does not match configuration");
    const Point v10(1.0, 0.0), v01(0.0, 1.0), vd(std::sqrt(0.5), std::sqrt(0.5));
    std::vector<double> q10(n_walks), q01(n_walks), qd(n_walks);
    std::vector<char> ok(n_walks, 0);
    parallel_for(n_walks, opts.threads, [&](std::size_t i) {
        CounterRng srng(seed, 2 * i + 1);
        std::optional<std::size_t> start;
        for (int attempt = 0; attempt < 1000 && !start; ++attempt) {
            const Point z = opts.center + opts.start_box * Point(srng.uniform() - 0.5, srng.uniform() - 0.5);
            start = c.cell_containing(z);
        }
        if (!start)
            throw WalkError("start box meets no cell");
        const WalkTrace tr = run_walk(c, *start, {T, SIZE_MAX}, seed, true, 2 * i);
        if (tr.end_time < T)
            return;
        ok[i] = 1;
        q10[i] = quadratic_variation(tr, e, v10, T) / T;
        q01[i] = quadratic_variation(tr, e, v01, T) / T;
        qd[i] = quadratic_variation(tr, e, vd, T) / T;
    });
    std::vector<double> a, b, d, r;
    for (std::size_t i = 0; i < n_walks; ++i) {
        if (!ok[i])
            continue;
        a.push_back(q10[i]);
        b.push_back(q01[i]);
        d.push_back(qd[i]);
        r.push_back(qd[i] - 0.5 * q10[i] - 0.5 * q01[i]);
    }
    SigmaEstimate s;
    s.horizon = T;
    s.walks = a.size();
    s.discarded = n_walks - a.size();
    s.boundary_warning = s.discarded * 10 > n_walks;
    if (s.walks < 2)
        return s;
    const BatchStats sa = mean_stats(a), sb = mean_stats(b), sd = mean_stats(d), sr = mean_stats(r);
    s.c_10 = sa.mean;
    s.se_10 = sa.std_error;
    s.c_01 = sb.mean;
    s.se_01 = sb.std_error;
    s.c_diag = sd.mean;
    s.se_diag = sd.std_error;
    s.rho = sr.mean;
    s.se_rho = sr.std_error;
    s.sigma_valid = s.c_10 > 2.0 * s.se_10 && s.c_01 > 2.0 * s.se_01 && s.c_diag > 2.0 * s.se_diag;
    if (s.sigma_valid)
        s.sigma << s.c_10, s.rho, s.rho, s.c_01;
    return s;
}

JumpTruncation jump_truncation_stats(const CellConfiguration& c, const Embedding& e, const WalkTrace& trace,
                                     const Point& v, double delta, double T)
{
    if (T > trace.end_time)
        throw WalkError("horizon exceeds the trace");
    if (!(T > 0.0) || delta < 0.0)
        throw WalkError("need T > 0 and delta >= 0");
    const double r = delta * std::sqrt(T);
    JumpTruncation out;
    for (std::size_t j = 1; j < trace.cells.size() && trace.jump_times[j] <= T; ++j) {
        const std::size_t prev = trace.cells[j - 1];
        const double d = v.dot(e[trace.cells[j]] - e[prev]);
        if (std::abs(d) >= r)
            out.large_jumps += d * d;
        double comp = 0.0;
        for (auto it = c.neighbors_begin(prev); it != c.neighbors_end(prev); ++it) {
            const double dd = v.dot(e[it->cell] - e[prev]);
            if (std::abs(dd) >= r)
                comp += it->conductance * dd * dd;
        }
        out.compensator += comp / c.pi(prev);
    }
    out.large_jumps /= T;
    out.compensator /= T;
    return out;
}

std::vector<std::size_t> loop_erase(const std::vector<std::size_t>& path)
{
    if (path.empty())
        throw WalkError("loop_erase needs a nonempty path");
    std::vector<std::size_t> out;
    std::unordered_map<std::size_t, std::size_t> pos;
    for (std::size_t x : path) {
        auto it = pos.find(x);
        if (it != pos.end()) {
            for (std::size_t k = it->second + 1; k < out.size(); ++k)
                pos.erase(out[k]);
            out.resize(it->second + 1);
        } else {
            pos.emplace(x, out.size());
            out.push_back(x);
        }
    }
    return out;
}

std::vector<std::size_t> walk_until(const CellConfiguration& c, std::size_t start, const std::vector<char>& target,
                                    CounterRng& rng, std::size_t max_steps)
{
    std::vector<std::size_t> path{start};
    std::size_t cur = start;
    while (!target[cur]) {
        if (path.size() > max_steps)
            throw WalkError("walk did not reach the target set");
        cur = step(c, cur, rng);
        path.push_back(cur);
    }
    return path;
}

std::vector<double> exit_distribution(const CellConfiguration& c, std::size_t start, const std::vector<char>& target)
{
    if (target.size() != c.size())
        throw WalkError("target mask does not match configuration");
    std::vector<double> mu(c.size(), 0.0);
    if (target[start]) {
        mu[start] = 1.0;
        return mu;
    }
    // Component of start among non-target cells.
    std::vector<long> local(c.size(), -1);
    std::vector<std::size_t> free_cells{start};
    local[start] = 0;
    for (std::size_t k = 0; k < free_cells.size(); ++k) {
        const std::size_t i = free_cells[k];
        for (auto it = c.neighbors_begin(i); it != c.neighbors_end(i); ++it)
            if (!target[it->cell] && local[it->cell] < 0) {
                local[it->cell] = static_cast<long>(free_cells.size());
                free_cells.push_back(it->cell);
            }
    }
    std::vector<double> rhs(free_cells.size(), 0.0);
    rhs[0] = 1.0;
    const std::vector<double> u = solve_green(c, free_cells, rhs);
    for (std::size_t k = 0; k < free_cells.size(); ++k) {
        const std::size_t i = free_cells[k];
        for (auto it = c.neighbors_begin(i); it != c.neighbors_end(i); ++it)
            if (target[it->cell])
                mu[it->cell] += it->conductance * u[k];
    }
    return mu;
}

CouplingReport exit_coupling_tv(const CellConfiguration& c, std::size_t x, std::size_t y,
                                const std::vector<char>& target, std::size_t n_samples, std::uint64_t seed,
                                unsigned threads)
{
    if (target.size() != c.size())
        throw WalkError("target mask does not match configuration");
    if (n_samples < 2)
        throw WalkError("need at least two samples");
    std::vector<std::size_t> exit_x(n_samples), exit_y(n_samples);
    std::vector<char> disc(n_samples, 0);
    const std::size_t cap = 10000 * c.size() + 1000000;
    parallel_for(n_samples, threads, [&](std::size_t k) {
        CounterRng rx(seed, 2 * k), ry(seed, 2 * k + 1);
        const auto px = walk_until(c, x, target, rx, cap);
        exit_x[k] = px.back();
        exit_y[k] = walk_until(c, y, target, ry, cap).back();
        // Does the path of X^x before its hitting time separate y from the target?
        std::vector<char> mark(c.size(), 0);
        for (std::size_t j = 0; j + 1 < px.size(); ++j)
            mark[px[j]] = 1;
        if (mark[y]) {
            disc[k] = 1;
            return;
        }
        std::deque<std::size_t> q{y};
        mark[y] = 2;
        bool reached = target[y] != 0;
        while (!q.empty() && !reached) {
            const std::size_t i = q.front();
            q.pop_front();
            for (auto it = c.neighbors_begin(i); it != c.neighbors_end(i); ++it) {
                if (mark[it->cell])
                    continue;
                if (target[it->cell]) {
                    reached = true;
                    break;
                }
                mark[it->cell] = 2;
                q.push_back(it->cell);
            }
        }
        disc[k] = reached ? 0 : 1;
    });
    std::map<std::size_t, double> px, py;
    for (std::size_t k = 0; k < n_samples; ++k) {
        px[exit_x[k]] += 1.0;
        py[exit_y[k]] += 1.0;
    }
    const double n = static_cast<double>(n_samples);
    std::map<std::size_t, std::pair<double, double>> both;
    for (auto& [a, w] : px)
        both[a].first = w / n;
    for (auto& [a, w] : py)
        both[a].second = w / n;
    CouplingReport rep;
    rep.samples = n_samples;
    double sp = 0.0, sq = 0.0;
    for (const auto& [a, pq] : both) {
        const double d = pq.first - pq.second;
        rep.tv += 0.5 * std::abs(d);
        const double s = d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
        sp += s * pq.first;
        sq += s * pq.second;
    }
    // Delta method on ½ Σ s_a (p_a - q_a) with the signs frozen.
    rep.tv_se = 0.5 * std::sqrt(std::max(0.0, 1.0 - sp * sp) / n + std::max(0.0, 1.0 - sq * sq) / n);
    double dsum = 0.0;
    for (char d : disc)
        dsum += d;
    rep.disconnect = dsum / n;
    rep.disconnect_se = std::sqrt(rep.disconnect * (1.0 - rep.disconnect) / n);
    rep.bound = 1.0 - rep.disconnect;
    const auto mx = exit_distribution(c, x, target);
    const auto my = exit_distribution(c, y, target);
    for (std::size_t i = 0; i < c.size(); ++i)
        rep.tv_exact += 0.5 * std::abs(mx[i] - my[i]);
    // The plug-in TV is biased upward by the number of atoms, so the inequality
    // is checked on the exact value.
    rep.satisfied = rep.tv_exact <= rep.bound + 3.0 * rep.disconnect_se + 1e-12;
    return rep;
}

Point brownian_exit_point(const std::vector<Point>& polygon, const Point& z, const Eigen::Matrix2d& sigma,
                          CounterRng& rng, double stop_distance)
{
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(sigma);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw WalkError("covariance must be positive definite");
    const Eigen::Matrix2d isqrt = es.operatorInverseSqrt();
    const Eigen::Matrix2d sqrt = es.operatorSqrt();
    std::vector<Point> poly;
    poly.reserve(polygon.size());
    for (const Point& p : polygon)
        poly.push_back(isqrt * p);
    auto nearest = [&](const Point& y, double& dist) {
        Point best = y;
        dist = INFINITY;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Point q = closest_point_on_segment(y, poly[i], poly[(i + 1) % poly.size()]);
            const double d = (q - y).norm();
            if (d < dist) {
                dist = d;
                best = q;
            }
        }
        return best;
    };
    Point y = isqrt * z;
    for (int it = 0; it < 100000; ++it) {
        double d = 0.0;
        const Point q = nearest(y, d);
        if (d <= stop_distance)
            return sqrt * q;
        const double a = 2.0 * std::numbers::pi * rng.uniform();
        y += d * Point(std::cos(a), std::sin(a));
    }
    throw WalkError("walk on spheres did not terminate");
}

ExitLawReport exit_law_prokhorov(const CellConfiguration& c, const Embedding& e, std::size_t start,
                                 const Square& s, const Eigen::Matrix2d& sigma, std::size_t n_samples,
                                 std::uint64_t seed, unsigned threads)
{
    if (e.size() != c.size())
        throw WalkError("embedding does not match configuration");
    if (n_samples == 0)
        throw WalkError("need samples");
    ExitLawReport rep;
    rep.enlarged = s.scaled_about_center(3.0);
    const Square& big = rep.enlarged;
    if (!c.bounded() && !c.window().contains_square(big.scaled_about_center(1.0), -1e-9))
        throw WalkError("enlarged square leaves the window");
    const Point lo = big.anchor, hi = big.far_corner();
    auto strictly_inside = [&](const Point& p) {
        return p.x() > lo.x() && p.x() < hi.x() && p.y() > lo.y() && p.y() < hi.y();
    };
    const Point center = s.center();
    const Point z0 = e[start];
    std::vector<Point> walk_pts(n_samples), bm_pts(n_samples);
    const std::vector<Point> poly = big.corners();
    const std::size_t cap = 100000 * c.size() + 1000000;
    parallel_for(n_samples, threads, [&](std::size_t k) {
        CounterRng rw(seed, 2 * k), rb(seed, 2 * k + 1);
        Point exit_pt;
        if (!strictly_inside(z0)) {
            exit_pt = z0.cwiseMax(lo).cwiseMin(hi);
        } else {
            std::size_t cur = start;
            Point p = z0;
            for (std::size_t n = 0;; ++n) {
                if (n > cap)
                    throw WalkError("walk did not leave the enlarged square");
                if (c.frozen(cur))
                    throw WalkError("walk reached the frozen layer before leaving the square");
                cur = step(c, cur, rw);
                const Point q = e[cur];
                if (strictly_inside(q)) {
                    p = q;
                    continue;
                }
                // First crossing of segment p -> q with the boundary.
                double t = 1.0;
                const Point d = q - p;
                for (int ax = 0; ax < 2; ++ax) {
                    if (d[ax] > 0.0)
                        t = std::min(t, (hi[ax] - p[ax]) / d[ax]);
                    else if (d[ax] < 0.0)
                        t = std::min(t, (lo[ax] - p[ax]) / d[ax]);
                }
                exit_pt = (p + std::clamp(t, 0.0, 1.0) * d).cwiseMax(lo).cwiseMin(hi);
                break;
            }
        }
        walk_pts[k] = (exit_pt - center) / s.side;
        const Point b = strictly_inside(z0) ? brownian_exit_point(poly, z0, sigma, rb, 1e-7 * big.side)
                                            : Point(z0.cwiseMax(lo).cwiseMin(hi));
        bm_pts[k] = (b - center) / s.side;
    });
    const EmpiricalMeasure mw = EmpiricalMeasure::from_samples(walk_pts);
    const EmpiricalMeasure mb = EmpiricalMeasure::from_samples(bm_pts);
    rep.walk_atoms = mw.size();
    rep.samples = n_samples;
    rep.distance = prokhorov_distance(mw, mb, 1e-4);
    return rep;
}

std::vector<RecurrenceRow> recurrence_resistance(const CellConfiguration& c, const DyadicSystem2D& d, int r_min,
                                                 int r_max)
{
    if (r_min < 2 || r_max < r_min)
        throw WalkError("recurrence needs 2 <= r_min <= r_max");
    const auto h0 = c.cell_containing(Point(0.0, 0.0));
    if (!h0)
        throw WalkError("origin lies outside every cell");
    const double ell = std::sqrt(c.area(*h0));
    const int k = d.level_at_least(0.5 * ell);
    const Square sk = d.origin_square(k);
    const Point v = sk.center();
    const double L = sk.side;
    std::vector<RecurrenceRow> rows;
    for (int r = r_min; r <= r_max; ++r) {
        const double r1 = 2.0 * L;
        const double rr = std::ldexp(L, r);
        const Square reach{v - Point(rr, rr), 2.0 * rr};
        if (!c.bounded() && !c.window().contains_square(reach.scaled_about_center(1.0), -1.0))
            throw WalkError("annulus leaves the window");
        std::vector<double> f(c.size(), 1.0);
        const double denom = std::log(std::ldexp(1.0, r - 1));
        for (std::size_t i : c.candidates(reach.scaled_about_center(1.05).box())) {
            double maxd = 0.0;
            for_each_edge(c.region(i), [&](const Point& a, const Point&) { maxd = std::max(maxd, (a - v).norm()); });
            if (region_meets_disk(c.region(i), v, r1)) {
                f[i] = 0.0;
            } else if (maxd >= rr) {
                f[i] = 1.0;
            } else {
                const double g = (std::log((c.centroid(i) - v).norm()) - std::log(r1)) / denom;
                f[i] = std::clamp(g, 0.0, 1.0);
            }
        }
        RecurrenceRow row;
        row.r = r;
        row.energy = dirichlet_energy(c, f);
        row.resistance_bound = row.energy > 0.0 ? 1.0 / row.energy : INFINITY;
        row.oracle = 2.0 * std::numbers::pi / ((r - 1) * std::numbers::ln2);
        rows.push_back(row);
    }
    return rows;
}

ReturnReport return_time_stats(const CellConfiguration& c, std::size_t start, std::size_t n_excursions,
                               std::size_t step_cap, std::uint64_t seed, unsigned threads)
{
    if (start >= c.size() || n_excursions == 0)
        throw WalkError("return_time_stats needs a valid start and excursions");
    std::vector<std::size_t> steps(n_excursions, 0);
    parallel_for(n_excursions, threads, [&](std::size_t k) {
        CounterRng rng(seed, k);
        std::size_t cur = start;
        for (std::size_t n = 1; n <= step_cap; ++n) {
            cur = step(c, cur, rng);
            if (cur == start) {
                steps[k] = n;
                return;
            }
        }
    });
    ReturnReport rep;
    rep.excursions = n_excursions;
    std::vector<double> ret;
    for (std::size_t s : steps) {
        if (s)
            ret.push_back(static_cast<double>(s));
        else
            ++rep.censored;
    }
    rep.fraction = static_cast<double>(ret.size()) / static_cast<double>(n_excursions);
    rep.median_steps = ret.empty() ? 0.0 : median(ret);
    return rep;
}

TwoSidedTrace run_two_sided(const CellConfiguration& c, std::size_t start, double horizon, std::uint64_t seed)
{
    TwoSidedTrace tr;
    tr.forward = run_walk(c, start, {horizon, SIZE_MAX}, seed, false, 0);
    CounterRng rng(seed, 1);
    std::size_t cur = start;
    double t = tr.forward.jump_times.front();
    while (t > -horizon) {
        cur = step(c, cur, rng);
        t -= c.holding_time(cur);
        tr.back_cells.push_back(cur);
        tr.back_times.push_back(t);
    }
    return tr;
}

std::vector<TimeAverage> walk_ergodic_average(const CellConfiguration& c, const DyadicSystem1D& d1,
                                              const TwoSidedTrace& trace, const CellFunctional& f,
                                              const std::vector<double>& a_levels)
{
    const WalkTrace& fw = trace.forward;
    const double earliest = trace.back_times.empty() ? fw.jump_times.front() : trace.back_times.back();
    std::vector<TimeAverage> out;
    for (double a : a_levels) {
        const int k = d1.level_at_most(a);
        const double t0 = d1.start(k), len = d1.length(k), t1 = t0 + len;
        if (t0 < earliest || t1 > fw.end_time)
            throw WalkError("trace does not cover the interval for a = " + std::to_string(a));
        double integral = 0.0;
        auto add = [&](std::size_t cell, double s0, double s1) {
            const double lo = std::max(s0, t0), hi = std::min(s1, t1);
            if (hi > lo)
                integral += (hi - lo) * f(c, cell);
        };
        for (std::size_t j = 0; j < fw.cells.size(); ++j) {
            const double s0 = fw.jump_times[j];
            const double s1 = j + 1 < fw.cells.size() ? fw.jump_times[j + 1] : fw.end_time;
            if (s0 >= t1)
                break;
            add(fw.cells[j], s0, s1);
        }
        double upper = fw.jump_times.front();
        for (std::size_t j = 0; j < trace.back_cells.size(); ++j) {
            if (upper <= t0)
                break;
            add(trace.back_cells[j], trace.back_times[j], upper);
            upper = trace.back_times[j];
        }
        out.push_back({a, t0, len, integral / len});
    }
    return out;
}

} // namespace rwre
