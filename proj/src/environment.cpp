#include "rwre/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <unordered_map>

namespace rwre {

std::string to_string(ViolationKind k)
{
    switch (k) {
    case ViolationKind::NonpositiveConductance:
        return "nonpositive_conductance";
    case ViolationKind::AsymmetricConductance:
        return "asymmetric_conductance";
    case ViolationKind::SelfLoop:
        return "self_loop";
    case ViolationKind::DuplicateEdge:
        return "duplicate_edge";
    case ViolationKind::Overlap:
        return "overlap";
    case ViolationKind::AdjacentDisjoint:
        return "adjacent_disjoint";
    case ViolationKind::DisconnectedAlongLine:
        return "disconnected_along_line";
    }
    return "unknown";
}

CellConfiguration::CellConfiguration(std::vector<Region> regions, std::vector<Edge> edges, Square window,
                                     ConfigOptions opts, std::vector<std::int64_t> ids)
    : window_(window), bounded_(opts.bounded)
{
    const std::size_t n = regions.size();
    if (!(window.side > 0.0) || !window.anchor.allFinite())
        throw EnvironmentError("window must have positive side");
    if (ids.empty()) {
        ids.resize(n);
        std::iota(ids.begin(), ids.end(), std::int64_t{0});
    }
    if (ids.size() != n)
        throw EnvironmentError("id list length differs from cell count");
    {
        std::vector<std::int64_t> sorted = ids;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw EnvironmentError("duplicate cell id");
    }
    ids_ = std::move(ids);

    regions_.reserve(n);
    area_.resize(n);
    centroid_.resize(n);
    diameter_.resize(n);
    bbox_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        try {
            regions_.push_back(normalized_region(std::move(regions[i]), opts.check_simple));
        } catch (const GeometryError& e) {
            throw EnvironmentError("cell " + std::to_string(ids_[i]) + ": " + e.what());
        }
        area_[i] = region_area(regions_[i]);
        centroid_[i] = region_centroid(regions_[i]);
        diameter_[i] = region_diameter(regions_[i]);
        bbox_[i] = region_bbox(regions_[i]);
    }

    // Normalize declared edges to a < b and detect conflicting declarations.
    struct Decl {
        std::size_t lo, hi;
        bool reversed;
        double c;
        std::size_t order;
    };
    std::vector<Decl> decls;
    decls.reserve(edges.size());
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const Edge& e = edges[k];
        if (e.a >= n || e.b >= n)
            throw EnvironmentError("edge references unknown cell");
        if (e.a == e.b) {
            issues_.push_back({ViolationKind::SelfLoop, e.a, e.b, e.conductance, "self-loop dropped"});
            continue;
        }
        decls.push_back({std::min(e.a, e.b), std::max(e.a, e.b), e.a > e.b, e.conductance, k});
    }
    std::stable_sort(decls.begin(), decls.end(),
                     [](const Decl& x, const Decl& y) { return x.lo < y.lo || (x.lo == y.lo && x.hi < y.hi); });
    for (std::size_t k = 0; k < decls.size();) {
        std::size_t j = k + 1;
        while (j < decls.size() && decls[j].lo == decls[k].lo && decls[j].hi == decls[k].hi)
            ++j;
        const Decl& first = decls[k];
        if (j - k == 2 && decls[k].reversed != decls[k + 1].reversed) {
            if (decls[k].c != decls[k + 1].c)
                issues_.push_back({ViolationKind::AsymmetricConductance, first.lo, first.hi,
                                   decls[k + 1].c - decls[k].c, "reverse declaration differs"});
        } else if (j - k >= 2) {
            issues_.push_back({ViolationKind::DuplicateEdge, first.lo, first.hi, static_cast<double>(j - k),
                               "pair declared more than once"});
        }
        edges_.push_back({first.lo, first.hi, first.c});
        k = j;
    }

    offsets_.assign(n + 1, 0);
    for (const auto& e : edges_) {
        ++offsets_[e.a + 1];
        ++offsets_[e.b + 1];
    }
    for (std::size_t i = 0; i < n; ++i)
        offsets_[i + 1] += offsets_[i];
    adj_.resize(offsets_[n]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges_) {
        adj_[fill[e.a]++] = {e.b, e.conductance};
        adj_[fill[e.b]++] = {e.a, e.conductance};
    }

    pi_.assign(n, 0.0);
    pi_star_.assign(n, 0.0);
    hold_.assign(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        for (auto it = neighbors_begin(i); it != neighbors_end(i); ++it) {
            pi_[i] += it->conductance;
            pi_star_[i] += 1.0 / it->conductance;
        }
        if (pi_[i] > 0.0)
            hold_[i] = area_[i] / pi_[i];
    }

    frozen_.assign(n, 0);
    if (!bounded_) {
        const Box wb = window_.box();
        const double margin = kGeomTol;
        for (std::size_t i = 0; i < n; ++i) {
            const Box& b = bbox_[i];
            const bool strictly_inside = b.lo.x() > wb.lo.x() + margin && b.lo.y() > wb.lo.y() + margin &&
                                         b.hi.x() < wb.hi.x() - margin && b.hi.y() < wb.hi.y() - margin;
            if (!strictly_inside)
                frozen_[i] = 1;
        }
    }
    build_index();
}

void CellConfiguration::build_index()
{
    const std::size_t n = regions_.size();
    bucket_offsets_.clear();
    bucket_items_.clear();
    if (n == 0) {
        grid_nx_ = grid_ny_ = 0;
        return;
    }
    const double inf = std::numeric_limits<double>::infinity();
    Point lo(inf, inf), hi(-inf, -inf);
    double mean_area = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        lo = lo.cwiseMin(bbox_[i].lo);
        hi = hi.cwiseMax(bbox_[i].hi);
        mean_area += area_[i];
    }
    mean_area /= static_cast<double>(n);
    const Point extent = (hi - lo).cwiseMax(Point::Constant(1e-12));
    double cell = std::max(std::sqrt(mean_area), 1e-12);
    // Keep the bucket count near the cell count.
    const double max_buckets = 4.0 * static_cast<double>(n) + 16.0;
    while ((extent.x() / cell + 1.0) * (extent.y() / cell + 1.0) > max_buckets)
        cell *= 1.5;
    grid_origin_ = lo;
    grid_cell_ = cell;
    grid_nx_ = static_cast<long>(std::floor(extent.x() / cell)) + 1;
    grid_ny_ = static_cast<long>(std::floor(extent.y() / cell)) + 1;
    const std::size_t nb = static_cast<std::size_t>(grid_nx_ * grid_ny_);

    auto range = [&](const Box& b, long& x0, long& x1, long& y0, long& y1) {
        x0 = std::clamp(static_cast<long>(std::floor((b.lo.x() - grid_origin_.x()) / grid_cell_)), 0L, grid_nx_ - 1);
        x1 = std::clamp(static_cast<long>(std::floor((b.hi.x() - grid_origin_.x()) / grid_cell_)), 0L, grid_nx_ - 1);
        y0 = std::clamp(static_cast<long>(std::floor((b.lo.y() - grid_origin_.y()) / grid_cell_)), 0L, grid_ny_ - 1);
        y1 = std::clamp(static_cast<long>(std::floor((b.hi.y() - grid_origin_.y()) / grid_cell_)), 0L, grid_ny_ - 1);
    };
    bucket_offsets_.assign(nb + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        long x0, x1, y0, y1;
        range(bbox_[i], x0, x1, y0, y1);
        for (long y = y0; y <= y1; ++y)
            for (long x = x0; x <= x1; ++x)
                ++bucket_offsets_[static_cast<std::size_t>(y * grid_nx_ + x) + 1];
    }
    for (std::size_t b = 0; b < nb; ++b)
        bucket_offsets_[b + 1] += bucket_offsets_[b];
    bucket_items_.resize(bucket_offsets_[nb]);
    std::vector<std::size_t> fill(bucket_offsets_.begin(), bucket_offsets_.end() - 1);
    for (std::size_t i = 0; i < n; ++i) {
        long x0, x1, y0, y1;
        range(bbox_[i], x0, x1, y0, y1);
        for (long y = y0; y <= y1; ++y)
            for (long x = x0; x <= x1; ++x)
                bucket_items_[fill[static_cast<std::size_t>(y * grid_nx_ + x)]++] = i;
    }
}

std::optional<std::size_t> CellConfiguration::index_of(std::int64_t id) const
{
    for (std::size_t i = 0; i < ids_.size(); ++i)
        if (ids_[i] == id)
            return i;
    return std::nullopt;
}

CellStats CellConfiguration::stats(std::size_t i) const
{
    if (i >= size())
        throw EnvironmentError("unknown cell " + std::to_string(i));
    return {area_[i], diameter_[i], pi_[i], pi_star_[i], degree(i)};
}

double CellConfiguration::conductance(std::size_t i, std::size_t j) const
{
    for (auto it = neighbors_begin(i); it != neighbors_end(i); ++it)
        if (it->cell == j)
            return it->conductance;
    return 0.0;
}

void CellConfiguration::set_lattice(LatticeData l)
{
    if (l.face_vertices.size() != size())
        throw EnvironmentError("lattice face list does not match cell count");
    for (const auto& f : l.face_vertices)
        for (std::size_t v : f)
            if (v >= l.vertices.size())
                throw EnvironmentError("lattice face references unknown vertex");
    for (const auto& e : l.edges)
        if (e.a >= l.vertices.size() || e.b >= l.vertices.size())
            throw EnvironmentError("lattice edge references unknown vertex");
    lattice_ = std::move(l);
}

std::vector<std::size_t> CellConfiguration::candidates(const Box& b) const
{
    std::vector<std::size_t> out;
    if (empty())
        return out;
    const double tol = kGeomTol;
    const long x0 = std::clamp(static_cast<long>(std::floor((b.lo.x() - tol - grid_origin_.x()) / grid_cell_)), 0L,
                               grid_nx_ - 1);
    const long x1 = std::clamp(static_cast<long>(std::floor((b.hi.x() + tol - grid_origin_.x()) / grid_cell_)), 0L,
                               grid_nx_ - 1);
    const long y0 = std::clamp(static_cast<long>(std::floor((b.lo.y() - tol - grid_origin_.y()) / grid_cell_)), 0L,
                               grid_ny_ - 1);
    const long y1 = std::clamp(static_cast<long>(std::floor((b.hi.y() + tol - grid_origin_.y()) / grid_cell_)), 0L,
                               grid_ny_ - 1);
    if (b.hi.x() + tol < grid_origin_.x() || b.hi.y() + tol < grid_origin_.y() ||
        b.lo.x() - tol > grid_origin_.x() + grid_cell_ * grid_nx_ ||
        b.lo.y() - tol > grid_origin_.y() + grid_cell_ * grid_ny_)
        return out;
    for (long y = y0; y <= y1; ++y)
        for (long x = x0; x <= x1; ++x) {
            const std::size_t k = static_cast<std::size_t>(y * grid_nx_ + x);
            for (std::size_t t = bucket_offsets_[k]; t < bucket_offsets_[k + 1]; ++t) {
                const std::size_t i = bucket_items_[t];
                if (bbox_[i].overlaps(b, tol))
                    out.push_back(i);
            }
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::size_t> CellConfiguration::cells_meeting(const Square& s, double tol) const
{
    std::vector<std::size_t> out;
    for (std::size_t i : candidates(s.box()))
        if (region_meets_square(regions_[i], s, tol))
            out.push_back(i);
    return out;
}

std::vector<std::size_t> CellConfiguration::cells_meeting_boundary(const Square& s, double tol) const
{
    std::vector<std::size_t> out;
    for (std::size_t i : candidates(s.box()))
        if (region_meets_square_boundary(regions_[i], s, tol))
            out.push_back(i);
    return out;
}

std::vector<std::size_t> CellConfiguration::cells_meeting_disk(const Point& c, double r, double tol) const
{
    std::vector<std::size_t> out;
    for (std::size_t i : candidates({c - Point::Constant(r), c + Point::Constant(r)}))
        if (region_meets_disk(regions_[i], c, r, tol))
            out.push_back(i);
    return out;
}

std::vector<std::size_t> CellConfiguration::cells_meeting_segment(const Point& a, const Point& b, double tol) const
{
    std::vector<std::size_t> out;
    for (std::size_t i : candidates({a.cwiseMin(b), a.cwiseMax(b)}))
        if (region_meets_segment(regions_[i], a, b, tol))
            out.push_back(i);
    return out;
}

std::optional<std::size_t> CellConfiguration::cell_containing(const Point& p) const
{
    const auto cand = candidates({p, p});
    for (std::size_t i : cand)
        if (point_in_region(regions_[i], p))
            return i;
    std::optional<std::size_t> best;
    double best_d = kGeomTol;
    for (std::size_t i : cand) {
        const double d = boundary_distance(regions_[i], p);
        if (d <= best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

CellConfiguration CellConfiguration::transformed(double scale, const Point& shift) const
{
    if (!(scale > 0.0))
        throw EnvironmentError("scale must be positive");
    std::vector<Region> regions;
    regions.reserve(size());
    for (const auto& r : regions_)
        regions.push_back(transformed_region(r, scale, shift));
    ConfigOptions opts;
    opts.bounded = bounded_;
    opts.check_simple = false;
    CellConfiguration out(std::move(regions), edges_, Square{scale * window_.anchor + shift, scale * window_.side}, opts,
                          ids_);
    if (lattice_) {
        LatticeData l = *lattice_;
        for (auto& v : l.vertices)
            v = scale * v + shift;
        out.set_lattice(std::move(l));
    }
    out.set_meta(meta_);
    return out;
}

double pi(const CellConfiguration& c, std::size_t cell) { return c.stats(cell).pi; }

double pi_star(const CellConfiguration& c, std::size_t cell) { return c.stats(cell).pi_star; }

CellConfiguration restrict(const CellConfiguration& c, const Square& box)
{
    const auto keep = c.cells_meeting(box);
    std::vector<std::size_t> map(c.size(), static_cast<std::size_t>(-1));
    std::vector<Region> regions;
    std::vector<std::int64_t> ids;
    regions.reserve(keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) {
        map[keep[k]] = k;
        regions.push_back(c.region(keep[k]));
        ids.push_back(c.id(keep[k]));
    }
    std::vector<Edge> edges;
    for (const auto& e : c.edges())
        if (map[e.a] != static_cast<std::size_t>(-1) && map[e.b] != static_cast<std::size_t>(-1))
            edges.push_back({map[e.a], map[e.b], e.conductance});
    ConfigOptions opts;
    opts.bounded = c.bounded();
    opts.check_simple = false;
    CellConfiguration out(std::move(regions), std::move(edges), c.window(), opts, std::move(ids));
    out.set_meta(c.meta());
    return out;
}

std::vector<std::size_t> boundary_cells(const CellConfiguration& c, const Square& box)
{
    return c.cells_meeting_boundary(box);
}

std::size_t ValidationReport::count(ViolationKind k) const
{
    return static_cast<std::size_t>(
        std::count_if(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == k; }));
}

std::vector<Segment> lattice_lines(const Square& window, double spacing, double inset)
{
    std::vector<Segment> out;
    if (!(spacing > 0.0))
        throw EnvironmentError("line spacing must be positive");
    const double lo = window.anchor.x();
    const double lo_y = window.anchor.y();
    const int count = static_cast<int>(std::floor((window.side - 2.0 * inset) / spacing + 1e-9));
    for (int k = 0; k <= count; ++k) {
        const double t = inset + k * spacing;
        out.push_back({Point(lo, lo_y + t), Point(lo + window.side, lo_y + t)});
        out.push_back({Point(lo + t, lo_y), Point(lo + t, lo_y + window.side)});
    }
    return out;
}

ValidationReport validate(const CellConfiguration& c, const std::vector<Segment>* lines)
{
    ValidationReport rep;
    rep.cells = c.size();
    rep.edges = c.edges().size();
    for (const auto& v : c.construction_issues())
        rep.violations.push_back(v);
    for (const auto& e : c.edges()) {
        if (!(e.conductance > 0.0) || !std::isfinite(e.conductance))
            rep.violations.push_back({ViolationKind::NonpositiveConductance, e.a, e.b, e.conductance, ""});
        const double d = region_distance(c.region(e.a), c.region(e.b));
        if (d > kGeomTol)
            rep.violations.push_back({ViolationKind::AdjacentDisjoint, e.a, e.b, d, "adjacent cells do not meet"});
    }
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j : c.candidates(c.bbox(i))) {
            if (j <= i)
                continue;
            const Box& a = c.bbox(i);
            const Box& b = c.bbox(j);
            const double ox = std::min(a.hi.x(), b.hi.x()) - std::max(a.lo.x(), b.lo.x());
            const double oy = std::min(a.hi.y(), b.hi.y()) - std::max(a.lo.y(), b.lo.y());
            const double limit = 1e-9 * std::min(c.area(i), c.area(j));
            if (ox <= 0.0 || oy <= 0.0 || ox * oy <= limit)
                continue;
            const double ov = intersection_area(c.region(i), c.region(j));
            if (ov > limit)
                rep.violations.push_back({ViolationKind::Overlap, i, j, ov, "interiors overlap"});
        }
    }
    if (lines) {
        for (const auto& s : *lines) {
            ++rep.lines_checked;
            const auto cells = c.cells_meeting_segment(s.a, s.b);
            if (cells.empty()) {
                ++rep.lines_connected;
                continue;
            }
            std::unordered_map<std::size_t, std::size_t> local;
            for (std::size_t k = 0; k < cells.size(); ++k)
                local[cells[k]] = k;
            std::vector<char> seen(cells.size(), 0);
            std::queue<std::size_t> q;
            q.push(0);
            seen[0] = 1;
            std::size_t reached = 1;
            while (!q.empty()) {
                const std::size_t u = cells[q.front()];
                q.pop();
                for (auto it = c.neighbors_begin(u); it != c.neighbors_end(u); ++it) {
                    auto f = local.find(it->cell);
                    if (f != local.end() && !seen[f->second]) {
                        seen[f->second] = 1;
                        ++reached;
                        q.push(f->second);
                    }
                }
            }
            if (reached == cells.size())
                ++rep.lines_connected;
            else
                rep.violations.push_back({ViolationKind::DisconnectedAlongLine, cells.front(), cells.size(),
                                          static_cast<double>(reached), "cells along a line are not connected"});
        }
    }
    return rep;
}

MomentReport moment_stats(const CellConfiguration& c, const Square& window)
{
    MomentReport rep;
    const auto cells = c.cells_meeting(window);
    if (cells.empty())
        throw EnvironmentError("window meets no cells");
    const auto& lat = c.lattice();
    std::vector<double> outrad;
    std::vector<double> vpi;
    std::vector<double> vpistar;
    if (lat) {
        const std::size_t nv = lat->vertices.size();
        vpi.assign(nv, 0.0);
        vpistar.assign(nv, 0.0);
        for (const auto& e : lat->edges) {
            vpi[e.a] += e.conductance;
            vpi[e.b] += e.conductance;
            vpistar[e.a] += 1.0 / e.conductance;
            vpistar[e.b] += 1.0 / e.conductance;
        }
        // Outrad(x): diameter of the union of faces with x on their boundary.
        std::vector<std::vector<std::size_t>> faces_at(nv);
        for (std::size_t f = 0; f < lat->face_vertices.size(); ++f)
            for (std::size_t v : lat->face_vertices[f])
                faces_at[v].push_back(f);
        outrad.assign(nv, std::numeric_limits<double>::quiet_NaN());
        for (std::size_t h : cells)
            for (std::size_t v : lat->face_vertices[h]) {
                if (!std::isnan(outrad[v]))
                    continue;
                Region u;
                for (std::size_t f : faces_at[v])
                    for (const auto& comp : c.region(f).components)
                        u.components.push_back(comp);
                outrad[v] = region_diameter(u);
            }
    }
    double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0, w = 0.0, dmax = 0.0;
    for (std::size_t h : cells) {
        const double wh = clipped_area(c.region(h), window);
        const double d2 = c.diameter(h) * c.diameter(h);
        s1 += wh * d2 * c.pi(h) / c.area(h);
        s2 += wh * d2 * c.pi_star(h) / c.area(h);
        if (lat) {
            double v1 = 0.0, v2 = 0.0;
            for (std::size_t v : lat->face_vertices[h]) {
                v1 += outrad[v] * outrad[v] * vpi[v];
                v2 += outrad[v] * outrad[v] * vpistar[v];
            }
            s3 += wh * v1 / c.area(h);
            s4 += wh * v2 / c.area(h);
        }
        w += wh;
        dmax = std::max(dmax, c.diameter(h));
    }
    rep.cells = cells.size();
    rep.weight = w;
    rep.mean_diam2_pi_over_area = s1 / w;
    rep.mean_diam2_pistar_over_area = s2 / w;
    rep.mean_outrad2_pi_over_area = lat ? s3 / w : std::numeric_limits<double>::quiet_NaN();
    rep.mean_outrad2_pistar_over_area = lat ? s4 / w : std::numeric_limits<double>::quiet_NaN();
    rep.max_diameter_over_side = dmax / window.side;
    return rep;
}

} // namespace rwre
