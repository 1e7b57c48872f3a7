#include "rwre/analysis.hpp"
#include "rwre/environment.hpp"
#include "rwre/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <unordered_map>

namespace rwre {

EmpiricalMeasure EmpiricalMeasure::from_samples(const std::vector<Point>& samples)
{
    if (samples.empty())
        throw AnalysisError("empirical measure needs samples");
    std::map<std::pair<double, double>, std::size_t> count;
    for (const Point& p : samples)
        ++count[{p.x(), p.y()}];
    EmpiricalMeasure m;
    const double n = static_cast<double>(samples.size());
    for (const auto& [k, c] : count) {
        m.points.emplace_back(k.first, k.second);
        m.weights.push_back(static_cast<double>(c) / n);
    }
    return m;
}

void EmpiricalMeasure::validate() const
{
    if (points.empty() || points.size() != weights.size())
        throw AnalysisError("empirical measure needs matching points and weights");
    double s = 0.0;
    for (double w : weights) {
        if (!(w > 0.0))
            throw AnalysisError("empirical measure weights must be positive");
        s += w;
    }
    if (std::abs(s - 1.0) > 1e-12)
        throw AnalysisError("empirical measure weights must sum to 1");
}

namespace {

class Dinic {
public:
    explicit Dinic(std::size_t n) : head_(n, -1), level_(n), it_(n) {}

    void add_edge(std::size_t u, std::size_t v, double cap)
    {
        edges_.push_back({v, head_[u], cap});
        head_[u] = static_cast<long>(edges_.size() - 1);
        edges_.push_back({u, head_[v], 0.0});
        head_[v] = static_cast<long>(edges_.size() - 1);
    }

    double max_flow(std::size_t s, std::size_t t)
    {
        double flow = 0.0;
        while (bfs(s, t)) {
            for (std::size_t i = 0; i < head_.size(); ++i)
                it_[i] = head_[i];
            while (true) {
                const double f = dfs(s, t, std::numeric_limits<double>::infinity());
                if (f <= kEps)
                    break;
                flow += f;
            }
        }
        return flow;
    }

private:
    static constexpr double kEps = 1e-15;
    struct E {
        std::size_t to;
        long next;
        double cap;
    };

    bool bfs(std::size_t s, std::size_t t)
    {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<std::size_t> q;
        level_[s] = 0;
        q.push(s);
        while (!q.empty()) {
            const std::size_t u = q.front();
            q.pop();
            for (long e = head_[u]; e != -1; e = edges_[e].next)
                if (edges_[e].cap > kEps && level_[edges_[e].to] < 0) {
                    level_[edges_[e].to] = level_[u] + 1;
                    q.push(edges_[e].to);
                }
        }
        return level_[t] >= 0;
    }

    // Iterative augmenting-path search along the level graph.
    double dfs(std::size_t s, std::size_t t, double)
    {
        std::vector<long> path;
        std::size_t u = s;
        while (true) {
            if (u == t) {
                double f = std::numeric_limits<double>::infinity();
                for (long e : path)
                    f = std::min(f, edges_[e].cap);
                for (long e : path) {
                    edges_[e].cap -= f;
                    edges_[e ^ 1].cap += f;
                }
                return f;
            }
            long& e = it_[u];
            while (e != -1 && !(edges_[e].cap > kEps && level_[edges_[e].to] == level_[u] + 1))
                e = edges_[e].next;
            if (e == -1) {
                if (path.empty())
                    return 0.0;
                level_[u] = -1;
                const long back = path.back();
                path.pop_back();
                u = edges_[back ^ 1].to;
                it_[u] = edges_[it_[u]].next;
                continue;
            }
            path.push_back(e);
            u = edges_[e].to;
        }
    }

    std::vector<E> edges_;
    std::vector<long> head_;
    std::vector<int> level_;
    std::vector<long> it_;
};

struct GridHash {
    double cell;
    std::unordered_map<long long, std::vector<std::size_t>> buckets;

    static long long key(long long i, long long j) { return i * 73856093LL ^ j * 19349663LL; }

    GridHash(const std::vector<Point>& pts, double h) : cell(h)
    {
        for (std::size_t k = 0; k < pts.size(); ++k)
            buckets[key(static_cast<long long>(std::floor(pts[k].x() / cell)),
                        static_cast<long long>(std::floor(pts[k].y() / cell)))]
                .push_back(k);
    }
};

} // namespace

bool prokhorov_at_most(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double eps)
{
    if (eps >= 1.0)
        return true;
    const std::size_t n = mu.size(), m = nu.size();
    const std::size_t s = n + m, t = n + m + 1;
    Dinic g(n + m + 2);
    for (std::size_t i = 0; i < n; ++i)
        g.add_edge(s, i, mu.weights[i]);
    for (std::size_t j = 0; j < m; ++j)
        g.add_edge(n + j, t, nu.weights[j]);
    const double inf = 2.0;
    const double e2 = eps * eps;
    if (eps > 0.0) {
        const GridHash hash(nu.points, eps);
        for (std::size_t i = 0; i < n; ++i) {
            const long long ci = static_cast<long long>(std::floor(mu.points[i].x() / eps));
            const long long cj = static_cast<long long>(std::floor(mu.points[i].y() / eps));
            for (long long di = -1; di <= 1; ++di)
                for (long long dj = -1; dj <= 1; ++dj) {
                    auto it = hash.buckets.find(GridHash::key(ci + di, cj + dj));
                    if (it == hash.buckets.end())
                        continue;
                    for (std::size_t j : it->second)
                        if ((mu.points[i] - nu.points[j]).squaredNorm() <= e2)
                            g.add_edge(i, n + j, inf);
                }
        }
    } else {
        std::map<std::pair<double, double>, std::size_t> where;
        for (std::size_t j = 0; j < m; ++j)
            where[{nu.points[j].x(), nu.points[j].y()}] = j;
        for (std::size_t i = 0; i < n; ++i) {
            auto it = where.find({mu.points[i].x(), mu.points[i].y()});
            if (it != where.end())
                g.add_edge(i, n + it->second, inf);
        }
    }
    // Strassen: a coupling with P(|X - Y| > ε) <= ε exists iff the flow is >= 1 - ε.
    return g.max_flow(s, t) >= 1.0 - eps - 1e-12;
}

double prokhorov_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double tol)
{
    mu.validate();
    nu.validate();
    if (!(tol > 0.0))
        throw AnalysisError("tolerance must be positive");
    if (prokhorov_at_most(mu, nu, 0.0))
        return 0.0;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (prokhorov_at_most(mu, nu, mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double ks_uniform(std::vector<double> samples)
{
    if (samples.empty())
        throw AnalysisError("ks_uniform needs samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double x = std::clamp(samples[i], 0.0, 1.0);
        d = std::max({d, (i + 1) / n - x, x - i / n});
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty())
        throw AnalysisError("ks_two_sample needs samples on both sides");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x)
            ++i;
        while (j < b.size() && b[j] <= x)
            ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return d;
}

BatchStats mean_stats(const std::vector<double>& values)
{
    BatchStats s;
    s.n = values.size();
    if (values.empty())
        return s;
    double sum = 0.0;
    for (double v : values)
        sum += v;
    s.mean = sum / static_cast<double>(s.n);
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : values)
            ss += (v - s.mean) * (v - s.mean);
        s.std_error = std::sqrt(ss / static_cast<double>(s.n - 1) / static_cast<double>(s.n));
    }
    return s;
}

BatchStats batch_means(const std::vector<double>& values, std::size_t n_batches)
{
    if (n_batches < 2 || values.size() < n_batches)
        throw AnalysisError("batch_means needs at least two non-empty batches");
    const std::size_t per = values.size() / n_batches;
    std::vector<double> means;
    for (std::size_t b = 0; b < n_batches; ++b) {
        double s = 0.0;
        for (std::size_t k = b * per; k < (b + 1) * per; ++k)
            s += values[k];
        means.push_back(s / static_cast<double>(per));
    }
    BatchStats st = mean_stats(means);
    st.n = per * n_batches;
    return st;
}

double median(std::vector<double> v)
{
    if (v.empty())
        throw AnalysisError("median of nothing");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string format_real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvTable::add_row(const std::vector<double>& values)
{
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values)
        row.push_back(format_real(v));
    rows.push_back(std::move(row));
}

std::string CsvTable::str() const
{
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows)
        line(r);
    return out;
}

void write_file_atomic(const std::string& path, const std::string& contents)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw AnalysisError("cannot open " + tmp.string() + " for writing");
        f << contents;
        f.flush();
        if (!f)
            throw AnalysisError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw AnalysisError("cannot rename onto " + path + ": " + ec.message());
    }
}

void write_csv(const std::string& path, const CsvTable& table) { write_file_atomic(path, table.str()); }

SvgScene scene_from_environment(const CellConfiguration& c)
{
    SvgScene s;
    s.cells.reserve(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        s.cells.push_back(c.region(i));
    return s;
}

SvgScene scene_from_embedding(const CellConfiguration& c, const Embedding& e)
{
    if (e.size() != c.size())
        throw AnalysisError("embedding does not match configuration");
    SvgScene s;
    for (std::size_t i = 0; i < c.size(); ++i) {
        s.cells.push_back(transformed_region(c.region(i), 1.0, e[i] - c.centroid(i)));
        for (auto it = c.neighbors_begin(i); it != c.neighbors_end(i); ++it)
            if (it->cell > i)
                s.segments.emplace_back(e[i], e[it->cell]);
    }
    return s;
}

namespace {

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

std::string render_svg(const SvgScene& scene)
{
    Box bb{{0.0, 0.0}, {1.0, 1.0}};
    bool any = false;
    auto grow = [&](const Point& p) {
        if (!any) {
            bb = {p, p};
            any = true;
        }
        bb.lo = bb.lo.cwiseMin(p);
        bb.hi = bb.hi.cwiseMax(p);
    };
    for (const auto& r : scene.cells)
        for (const auto& comp : r.components)
            for (const Point& p : comp.outer)
                grow(p);
    for (const auto& [a, b] : scene.segments) {
        grow(a);
        grow(b);
    }
    for (const auto& cv : scene.curves)
        for (const Point& p : cv.points)
            grow(p);
    for (const auto& sq : scene.squares) {
        grow(sq.anchor);
        grow(sq.far_corner());
    }
    const double span = std::max({bb.hi.x() - bb.lo.x(), bb.hi.y() - bb.lo.y(), 1e-12});
    const double k = scene.width_px / span;
    const double h = (bb.hi.y() - bb.lo.y()) * k;
    // SVG y grows downward.
    auto X = [&](const Point& p) { return num((p.x() - bb.lo.x()) * k); };
    auto Y = [&](const Point& p) { return num(h - (p.y() - bb.lo.y()) * k); };
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(scene.width_px) + "\" height=\"" +
           num(std::max(h, 1.0)) + "\">\n";
    for (const auto& r : scene.cells) {
        for (const auto& comp : r.components) {
            if (comp.holes.empty()) {
                out += "<polygon points=\"";
                for (std::size_t i = 0; i < comp.outer.size(); ++i) {
                    if (i)
                        out += ' ';
                    out += X(comp.outer[i]) + "," + Y(comp.outer[i]);
                }
                out += "\" fill=\"#dde6f0\" stroke=\"#34495e\" stroke-width=\"0.5\"/>\n";
            } else {
                out += "<path fill-rule=\"evenodd\" d=\"";
                auto ring = [&](const Ring& rg) {
                    for (std::size_t i = 0; i < rg.size(); ++i)
                        out += (i ? " L" : "M") + X(rg[i]) + "," + Y(rg[i]);
                    out += " Z ";
                };
                ring(comp.outer);
                for (const auto& hl : comp.holes)
                    ring(hl);
                out += "\" fill=\"#dde6f0\" stroke=\"#34495e\" stroke-width=\"0.5\"/>\n";
            }
        }
    }
    for (const auto& [a, b] : scene.segments)
        out += "<line x1=\"" + X(a) + "\" y1=\"" + Y(a) + "\" x2=\"" + X(b) + "\" y2=\"" + Y(b) +
               "\" stroke=\"#7f8c8d\" stroke-width=\"0.5\"/>\n";
    for (const auto& sq : scene.squares) {
        const Point tl(sq.anchor.x(), sq.anchor.y() + sq.side);
        out += "<rect x=\"" + X(tl) + "\" y=\"" + Y(tl) + "\" width=\"" + num(sq.side * k) + "\" height=\"" +
               num(sq.side * k) + "\" fill=\"none\" stroke=\"#27ae60\" stroke-width=\"1\"/>\n";
    }
    for (const auto& cv : scene.curves) {
        out += "<polyline points=\"";
        for (std::size_t i = 0; i < cv.points.size(); ++i) {
            if (i)
                out += ' ';
            out += X(cv.points[i]) + "," + Y(cv.points[i]);
        }
        out += "\" fill=\"none\" stroke=\"" + cv.stroke + "\" stroke-width=\"1\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace rwre
