#include "rwre/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rwre {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double orient(const Point& a, const Point& b, const Point& c) { return cross(b - a, c - a); }

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

bool on_segment_collinear(const Point& a, const Point& b, const Point& p)
{
    return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) && std::min(a.y(), b.y()) <= p.y() &&
           p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d)
{
    const int o1 = sign_of(orient(a, b, c));
    const int o2 = sign_of(orient(a, b, d));
    const int o3 = sign_of(orient(c, d, a));
    const int o4 = sign_of(orient(c, d, b));
    if (o1 != o2 && o3 != o4)
        return true;
    if (o1 == 0 && on_segment_collinear(a, b, c))
        return true;
    if (o2 == 0 && on_segment_collinear(a, b, d))
        return true;
    if (o3 == 0 && on_segment_collinear(c, d, a))
        return true;
    if (o4 == 0 && on_segment_collinear(c, d, b))
        return true;
    return false;
}

Ring cleaned_ring(const Ring& ring)
{
    Ring out;
    out.reserve(ring.size());
    for (const auto& p : ring) {
        if (!p.allFinite())
            throw GeometryError("non-finite vertex");
        if (out.empty() || out.back() != p)
            out.push_back(p);
    }
    while (out.size() > 1 && out.front() == out.back())
        out.pop_back();
    return out;
}

void ring_moments(const Ring& ring, double& area, Point& moment)
{
    // Moments relative to the first vertex, then shifted back, for accuracy.
    const Point o = ring.front();
    double a = 0.0;
    Point m(0.0, 0.0);
    const std::size_t n = ring.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const Point p = ring[i] - o;
        const Point q = ring[i + 1] - o;
        const double c = cross(p, q);
        a += c;
        m += c * (p + q);
    }
    area = 0.5 * a;
    moment = m / 6.0 + area * o;
}

std::vector<Point> clip_ring_convex(const Ring& ring, const std::vector<Point>& clip)
{
    std::vector<Point> out = ring;
    const std::size_t k = clip.size();
    for (std::size_t e = 0; e < k && !out.empty(); ++e) {
        const Point a = clip[e];
        const Point b = clip[(e + 1) % k];
        std::vector<Point> in;
        in.swap(out);
        const std::size_t n = in.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point& p = in[i];
            const Point& q = in[(i + 1) % n];
            const double sp = orient(a, b, p);
            const double sq = orient(a, b, q);
            if (sp >= 0.0) {
                out.push_back(p);
                if (sq < 0.0)
                    out.push_back(p + (q - p) * (sp / (sp - sq)));
            } else if (sq >= 0.0) {
                out.push_back(p + (q - p) * (sp / (sp - sq)));
            }
        }
    }
    return out;
}

double polyline_signed_area(const std::vector<Point>& pts)
{
    if (pts.size() < 3)
        return 0.0;
    const Point o = pts.front();
    double a = 0.0;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i)
        a += cross(pts[i] - o, pts[i + 1] - o);
    return 0.5 * a;
}

struct Interval {
    double lo = 1.0;
    double hi = 0.0;
    bool empty() const { return lo > hi; }
};

// Parameters t in [0,1] with |a + t (b - a) - p| <= eps.
Interval free_interval(const Point& a, const Point& b, const Point& p, double eps)
{
    const Point d = b - a;
    const Point f = a - p;
    const double qa = d.squaredNorm();
    const double qb = 2.0 * f.dot(d);
    const double qc = f.squaredNorm() - eps * eps;
    if (qa == 0.0)
        return qc <= 0.0 ? Interval{0.0, 1.0} : Interval{};
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0)
        return {};
    const double s = std::sqrt(disc);
    const double t0 = (-qb - s) / (2.0 * qa);
    const double t1 = (-qb + s) / (2.0 * qa);
    Interval iv{std::max(0.0, t0), std::min(1.0, t1)};
    return iv;
}

std::vector<Point> dedup(const std::vector<Point>& p)
{
    std::vector<Point> out;
    out.reserve(p.size());
    for (const auto& x : p)
        if (out.empty() || out.back() != x)
            out.push_back(x);
    return out;
}

bool lex_less(const std::vector<Point>& a, const std::vector<Point>& b)
{
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].x() != b[i].x())
            return a[i].x() < b[i].x();
        if (a[i].y() != b[i].y())
            return a[i].y() < b[i].y();
    }
    return a.size() < b.size();
}

double point_to_polyline_max(const Point& x, const std::vector<Point>& q)
{
    double m = 0.0;
    for (const auto& y : q)
        m = std::max(m, (x - y).norm());
    return m;
}

} // namespace

std::vector<Point> Square::corners() const
{
    return {anchor, anchor + Point(side, 0.0), anchor + Point(side, side), anchor + Point(0.0, side)};
}

Square Square::scaled_about_center(double factor) const
{
    const double s = side * factor;
    return {center() - Point::Constant(0.5 * s), s};
}

double ring_signed_area(const Ring& ring)
{
    if (ring.size() < 3)
        return 0.0;
    double a = 0.0;
    Point m;
    ring_moments(ring, a, m);
    return a;
}

bool ring_is_simple(const Ring& ring)
{
    const std::size_t n = ring.size();
    if (n < 3)
        return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = ring[i];
        const Point& b = ring[(i + 1) % n];
        // Adjacent edge folding back onto this one.
        const Point& c = ring[(i + 2) % n];
        if (orient(a, b, c) == 0.0 && (b - a).dot(c - b) < 0.0)
            return false;
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1)
                continue;
            if (segments_intersect(a, b, ring[j], ring[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

Region normalized_region(Region region, bool check_simple)
{
    if (region.components.empty())
        throw GeometryError("region has no components");
    auto fix = [&](Ring& ring, bool outer) {
        ring = cleaned_ring(ring);
        if (ring.size() < 3)
            throw GeometryError("ring with fewer than 3 distinct vertices");
        const double a = ring_signed_area(ring);
        double extent = 0.0;
        for (const auto& p : ring)
            extent = std::max(extent, (p - ring.front()).cwiseAbs().maxCoeff());
        if (std::abs(a) <= 1e-14 * extent * extent || a == 0.0)
            throw GeometryError("degenerate ring (zero area)");
        if ((a > 0.0) != outer)
            std::reverse(ring.begin(), ring.end());
        if (check_simple && !ring_is_simple(ring))
            throw GeometryError("ring is not simple");
    };
    for (auto& c : region.components) {
        fix(c.outer, true);
        for (auto& h : c.holes)
            fix(h, false);
    }
    if (!(region_area(region) > 0.0))
        throw GeometryError("region has nonpositive area");
    return region;
}

void validate_region(const Region& r, bool check_simple)
{
    (void)normalized_region(r, check_simple);
}

Region square_region(const Square& s)
{
    if (!(s.side > 0.0))
        throw GeometryError("square side must be positive");
    return Region{{Polygon{s.corners(), {}}}};
}

Region rect_region(const Point& lo, const Point& hi)
{
    if (!(hi.x() > lo.x() && hi.y() > lo.y()))
        throw GeometryError("empty rectangle");
    return Region{{Polygon{{lo, Point(hi.x(), lo.y()), hi, Point(lo.x(), hi.y())}, {}}}};
}

Region polygon_region(const Ring& outer) { return normalized_region(Region{{Polygon{outer, {}}}}); }

double region_area(const Region& r)
{
    double total = 0.0;
    for (const auto& c : r.components) {
        total += std::abs(ring_signed_area(c.outer));
        for (const auto& h : c.holes)
            total -= std::abs(ring_signed_area(h));
    }
    return total;
}

Point region_centroid(const Region& r)
{
    double total = 0.0;
    Point moment(0.0, 0.0);
    auto add = [&](const Ring& ring, double sign) {
        double a = 0.0;
        Point m;
        ring_moments(ring, a, m);
        // Orientation-independent: use the magnitude with the requested sign.
        const double s = (a >= 0.0 ? 1.0 : -1.0) * sign;
        total += s * a;
        moment += s * m;
    };
    for (const auto& c : r.components) {
        add(c.outer, 1.0);
        for (const auto& h : c.holes)
            add(h, -1.0);
    }
    if (!(total > 0.0))
        throw GeometryError("centroid of a zero-area region");
    return moment / total;
}

namespace {

std::vector<Point> convex_hull(std::vector<Point> pts)
{
    std::sort(pts.begin(), pts.end(),
              [](const Point& a, const Point& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3)
        return pts;
    std::vector<Point> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && orient(h[k - 2], h[k - 1], p) <= 0.0)
            --k;
        h[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        const Point& p = pts[i];
        while (k >= t && orient(h[k - 2], h[k - 1], p) <= 0.0)
            --k;
        h[k++] = p;
    }
    h.resize(k - 1);
    return h;
}

} // namespace

double region_diameter(const Region& r)
{
    std::vector<Point> pts;
    for (const auto& c : r.components)
        pts.insert(pts.end(), c.outer.begin(), c.outer.end());
    const std::vector<Point> hull = pts.size() > 64 ? convex_hull(pts) : pts;
    double best = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i)
        for (std::size_t j = i + 1; j < hull.size(); ++j)
            best = std::max(best, (hull[i] - hull[j]).squaredNorm());
    return std::sqrt(best);
}

Box region_bbox(const Region& r)
{
    const double inf = std::numeric_limits<double>::infinity();
    Box b{Point(inf, inf), Point(-inf, -inf)};
    for (const auto& c : r.components)
        for (const auto& p : c.outer) {
            b.lo = b.lo.cwiseMin(p);
            b.hi = b.hi.cwiseMax(p);
        }
    return b;
}

std::size_t region_vertex_count(const Region& r)
{
    std::size_t n = 0;
    for (const auto& c : r.components) {
        n += c.outer.size();
        for (const auto& h : c.holes)
            n += h.size();
    }
    return n;
}

Region transformed_region(const Region& r, double scale, const Point& shift)
{
    Region out = r;
    auto apply = [&](Ring& ring) {
        for (auto& p : ring)
            p = scale * p + shift;
        if (scale < 0.0)
            throw GeometryError("negative scale");
    };
    for (auto& c : out.components) {
        apply(c.outer);
        for (auto& h : c.holes)
            apply(h);
    }
    return out;
}

Point closest_point_on_segment(const Point& p, const Point& a, const Point& b)
{
    const Point d = b - a;
    const double l2 = d.squaredNorm();
    if (l2 == 0.0)
        return a;
    const double t = std::clamp((p - a).dot(d) / l2, 0.0, 1.0);
    return a + t * d;
}

double point_segment_distance(const Point& p, const Point& a, const Point& b)
{
    return (p - closest_point_on_segment(p, a, b)).norm();
}

double segment_segment_distance(const Point& a, const Point& b, const Point& c, const Point& d)
{
    if (segments_intersect(a, b, c, d))
        return 0.0;
    return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d), point_segment_distance(c, a, b),
                     point_segment_distance(d, a, b)});
}

bool point_in_region(const Region& r, const Point& p)
{
    bool inside = false;
    for_each_edge(r, [&](const Point& a, const Point& b) {
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
            if (p.x() < x)
                inside = !inside;
        }
    });
    return inside;
}

double boundary_distance(const Region& r, const Point& p)
{
    double best = std::numeric_limits<double>::infinity();
    for_each_edge(r, [&](const Point& a, const Point& b) { best = std::min(best, point_segment_distance(p, a, b)); });
    return best;
}

double point_region_distance(const Region& r, const Point& p)
{
    if (point_in_region(r, p))
        return 0.0;
    return boundary_distance(r, p);
}

double region_distance(const Region& a, const Region& b)
{
    for (const auto& c : a.components)
        if (point_in_region(b, c.outer.front()))
            return 0.0;
    for (const auto& c : b.components)
        if (point_in_region(a, c.outer.front()))
            return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for_each_edge(a, [&](const Point& p, const Point& q) {
        if (best == 0.0)
            return;
        for_each_edge(b, [&](const Point& s, const Point& t) {
            if (best == 0.0)
                return;
            best = std::min(best, segment_segment_distance(p, q, s, t));
        });
    });
    return best;
}

bool region_meets_segment(const Region& r, const Point& a, const Point& b, double tol)
{
    const Box rb = region_bbox(r);
    const Box sb{a.cwiseMin(b), a.cwiseMax(b)};
    if (!rb.overlaps(sb, tol))
        return false;
    if (point_in_region(r, a))
        return true;
    bool hit = false;
    for_each_edge(r, [&](const Point& p, const Point& q) {
        if (!hit && segment_segment_distance(p, q, a, b) <= tol)
            hit = true;
    });
    return hit;
}

bool region_meets_square(const Region& r, const Square& s, double tol)
{
    if (!region_bbox(r).overlaps(s.box(), tol))
        return false;
    for (const auto& c : r.components)
        for (const auto& p : c.outer)
            if (s.contains_closed(p, tol))
                return true;
    const auto corners = s.corners();
    for (const auto& p : corners)
        if (point_in_region(r, p))
            return true;
    bool hit = false;
    for_each_edge(r, [&](const Point& p, const Point& q) {
        for (int k = 0; k < 4 && !hit; ++k)
            if (segment_segment_distance(p, q, corners[k], corners[(k + 1) % 4]) <= tol)
                hit = true;
    });
    return hit;
}

bool region_meets_square_boundary(const Region& r, const Square& s, double tol)
{
    if (!region_bbox(r).overlaps(s.box(), tol))
        return false;
    const auto corners = s.corners();
    for (int k = 0; k < 4; ++k)
        if (region_meets_segment(r, corners[k], corners[(k + 1) % 4], tol))
            return true;
    return false;
}

bool region_meets_disk(const Region& r, const Point& center, double radius, double tol)
{
    const Box b = region_bbox(r);
    const Point nearest = center.cwiseMax(b.lo).cwiseMin(b.hi);
    if ((nearest - center).norm() > radius + tol)
        return false;
    return point_region_distance(r, center) <= radius + tol;
}

double clipped_area(const Region& r, const std::vector<Point>& convex_ccw)
{
    double total = 0.0;
    for (const auto& c : r.components) {
        total += std::abs(polyline_signed_area(clip_ring_convex(c.outer, convex_ccw)));
        for (const auto& h : c.holes)
            total -= std::abs(polyline_signed_area(clip_ring_convex(h, convex_ccw)));
    }
    return std::max(0.0, total);
}

double clipped_area(const Region& r, const Square& s)
{
    const Box b = region_bbox(r);
    const Box sb = s.box();
    if (!b.overlaps(sb))
        return 0.0;
    if (sb.lo.x() <= b.lo.x() && sb.lo.y() <= b.lo.y() && b.hi.x() <= sb.hi.x() && b.hi.y() <= sb.hi.y())
        return region_area(r);
    return clipped_area(r, s.corners());
}

namespace {

struct DirectedEdge {
    Point a;
    Point b;
};

std::vector<DirectedEdge> directed_edges(const Region& r)
{
    // Outer rings counterclockwise, holes clockwise: interior on the left.
    std::vector<DirectedEdge> out;
    auto add = [&](const Ring& ring, bool outer) {
        const bool ccw = ring_signed_area(ring) > 0.0;
        const bool flip = (ccw != outer);
        const std::size_t n = ring.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point& p = ring[i];
            const Point& q = ring[(i + 1) % n];
            out.push_back(flip ? DirectedEdge{q, p} : DirectedEdge{p, q});
        }
    };
    for (const auto& c : r.components) {
        add(c.outer, true);
        for (const auto& h : c.holes)
            add(h, false);
    }
    return out;
}

// Parameters along (a, b) where it meets the edges of `other`.
std::vector<double> split_params(const DirectedEdge& e, const std::vector<DirectedEdge>& other)
{
    std::vector<double> ts{0.0, 1.0};
    const Point d = e.b - e.a;
    const double l2 = d.squaredNorm();
    for (const auto& o : other) {
        if (!segments_intersect(e.a, e.b, o.a, o.b))
            continue;
        const Point f = o.b - o.a;
        const double den = cross(d, f);
        if (den != 0.0) {
            const double t = cross(o.a - e.a, f) / den;
            ts.push_back(std::clamp(t, 0.0, 1.0));
        } else {
            ts.push_back(std::clamp((o.a - e.a).dot(d) / l2, 0.0, 1.0));
            ts.push_back(std::clamp((o.b - e.a).dot(d) / l2, 0.0, 1.0));
        }
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
}

} // namespace

double intersection_area(const Region& ra, const Region& rb)
{
    if (!region_bbox(ra).overlaps(region_bbox(rb)))
        return 0.0;
    const auto ea = directed_edges(ra);
    const auto eb = directed_edges(rb);
    const Box box = region_bbox(ra);
    const Point o = box.lo;
    const double scale = std::max(1.0, (box.hi - box.lo).maxCoeff());
    const double on_tol = 1e-12 * scale;
    double twice = 0.0;

    auto coincident_dir = [&](const Point& m, const std::vector<DirectedEdge>& edges, const Point& dir) {
        // +1 same direction as a coincident boundary edge, -1 opposite, 0 none.
        for (const auto& e : edges) {
            if (point_segment_distance(m, e.a, e.b) <= on_tol) {
                const Point ed = e.b - e.a;
                if (std::abs(cross(ed.normalized(), dir.normalized())) <= 1e-9)
                    return ed.dot(dir) > 0.0 ? 1 : -1;
            }
        }
        return 0;
    };
    auto near_boundary = [&](const Point& m, const std::vector<DirectedEdge>& edges) {
        for (const auto& e : edges)
            if (point_segment_distance(m, e.a, e.b) <= on_tol)
                return true;
        return false;
    };

    for (const auto& e : ea) {
        const auto ts = split_params(e, eb);
        for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
            const Point p = e.a + ts[k] * (e.b - e.a);
            const Point q = e.a + ts[k + 1] * (e.b - e.a);
            if (p == q)
                continue;
            const Point m = 0.5 * (p + q);
            const int dir = coincident_dir(m, eb, q - p);
            bool take = false;
            if (dir != 0)
                take = dir > 0;
            else if (!near_boundary(m, eb))
                take = point_in_region(rb, m);
            if (take)
                twice += cross(p - o, q - o);
        }
    }
    for (const auto& e : eb) {
        const auto ts = split_params(e, ea);
        for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
            const Point p = e.a + ts[k] * (e.b - e.a);
            const Point q = e.a + ts[k + 1] * (e.b - e.a);
            if (p == q)
                continue;
            const Point m = 0.5 * (p + q);
            if (near_boundary(m, ea))
                continue;
            if (point_in_region(ra, m))
                twice += cross(p - o, q - o);
        }
    }
    return std::max(0.0, 0.5 * twice);
}

bool frechet_at_most(const std::vector<Point>& p, const std::vector<Point>& q, double eps)
{
    const std::size_t np = p.size();
    const std::size_t nq = q.size();
    if (np == 0 || nq == 0)
        throw GeometryError("empty polyline");
    if ((p.front() - q.front()).norm() > eps || (p.back() - q.back()).norm() > eps)
        return false;
    if (np == 1)
        return point_to_polyline_max(p.front(), q) <= eps;
    if (nq == 1)
        return point_to_polyline_max(q.front(), p) <= eps;
    const std::size_t sp = np - 1;
    const std::size_t sq = nq - 1;
    // left[i][j]: reachable part of the boundary at p_i over segment q_j q_{j+1}.
    // bottom[i][j]: reachable part of the boundary at q_j over segment p_i p_{i+1}.
    std::vector<Interval> left((sp + 1) * sq);
    std::vector<Interval> bottom(sp * (sq + 1));
    auto L = [&](std::size_t i, std::size_t j) -> Interval& { return left[i * sq + j]; };
    auto B = [&](std::size_t i, std::size_t j) -> Interval& { return bottom[i * (sq + 1) + j]; };

    for (std::size_t i = 0; i < sp; ++i) {
        const Interval f = free_interval(p[i], p[i + 1], q[0], eps);
        if (i == 0 || (!B(i - 1, 0).empty() && B(i - 1, 0).hi >= 1.0))
            B(i, 0) = (!f.empty() && f.lo <= 0.0) ? f : Interval{};
        else
            B(i, 0) = Interval{};
    }
    for (std::size_t j = 0; j < sq; ++j) {
        const Interval f = free_interval(q[j], q[j + 1], p[0], eps);
        if (j == 0 || (!L(0, j - 1).empty() && L(0, j - 1).hi >= 1.0))
            L(0, j) = (!f.empty() && f.lo <= 0.0) ? f : Interval{};
        else
            L(0, j) = Interval{};
    }
    for (std::size_t i = 0; i < sp; ++i) {
        for (std::size_t j = 0; j < sq; ++j) {
            const Interval& lr = L(i, j);
            const Interval& br = B(i, j);
            const Interval right_free = free_interval(q[j], q[j + 1], p[i + 1], eps);
            const Interval top_free = free_interval(p[i], p[i + 1], q[j + 1], eps);
            Interval right{};
            Interval top{};
            if (!br.empty())
                right = right_free;
            else if (!lr.empty())
                right = Interval{std::max(right_free.lo, lr.lo), right_free.hi};
            if (!lr.empty())
                top = top_free;
            else if (!br.empty())
                top = Interval{std::max(top_free.lo, br.lo), top_free.hi};
            L(i + 1, j) = right;
            B(i, j + 1) = top;
        }
    }
    const Interval& a = L(sp, sq - 1);
    const Interval& b = B(sp - 1, sq);
    return (!a.empty() && a.hi >= 1.0) || (!b.empty() && b.hi >= 1.0);
}

double frechet_distance(const std::vector<Point>& p_in, const std::vector<Point>& q_in, double tol)
{
    std::vector<Point> p = dedup(p_in);
    std::vector<Point> q = dedup(q_in);
    if (p.empty() || q.empty())
        throw GeometryError("empty polyline");
    if (p == q)
        return 0.0;
    // The distance is symmetric; a canonical argument order makes it exactly so.
    if (lex_less(q, p))
        std::swap(p, q);
    double lo = std::max((p.front() - q.front()).norm(), (p.back() - q.back()).norm());
    if (frechet_at_most(p, q, lo))
        return lo;
    double hi = lo;
    for (const auto& a : p)
        for (const auto& b : q)
            hi = std::max(hi, (a - b).norm());
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        if (frechet_at_most(p, q, mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

void validate_curve(const TimedCurve& c)
{
    if (c.times.size() != c.points.size())
        throw GeometryError("curve times and points differ in length");
    if (c.points.size() < 2)
        throw GeometryError("curve needs at least 2 samples");
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        if (!std::isfinite(c.times[i]) || !c.points[i].allFinite())
            throw GeometryError("non-finite curve sample");
        if (i > 0 && !(c.times[i] > c.times[i - 1]))
            throw GeometryError("curve times must be strictly increasing");
    }
}

TimedCurve make_curve(std::vector<double> times, std::vector<Point> points)
{
    TimedCurve c{std::move(times), std::move(points)};
    validate_curve(c);
    return c;
}

double dcmp(const TimedCurve& a, const TimedCurve& b)
{
    validate_curve(a);
    validate_curve(b);
    return frechet_distance(a.points, b.points);
}

std::vector<Point> stopped_trace(const TimedCurve& c, double r)
{
    std::vector<Point> out;
    out.push_back(c.points.front());
    if (c.points.front().norm() >= r)
        return out;
    for (std::size_t i = 0; i + 1 < c.points.size(); ++i) {
        const Point& p = c.points[i];
        const Point& q = c.points[i + 1];
        if (q.norm() >= r) {
            const Point d = q - p;
            const double qa = d.squaredNorm();
            const double qb = 2.0 * p.dot(d);
            const double qc = p.squaredNorm() - r * r;
            const double t = std::clamp((-qb + std::sqrt(std::max(0.0, qb * qb - 4.0 * qa * qc))) / (2.0 * qa), 0.0, 1.0);
            out.push_back(p + t * d);
            return out;
        }
        out.push_back(q);
    }
    return out;
}

LocalDistance dcmp_loc(const TimedCurve& a, const TimedCurve& b, double r_max, int n_quad)
{
    if (!(r_max > 1.0) || n_quad < 2)
        throw GeometryError("dcmp_loc needs r_max > 1 and n_quad >= 2");
    validate_curve(a);
    validate_curve(b);
    const double h = (r_max - 1.0) / n_quad;
    double sum = 0.0;
    for (int i = 0; i < n_quad; ++i) {
        const double r = 1.0 + (i + 0.5) * h;
        const double d = frechet_distance(stopped_trace(a, r), stopped_trace(b, r));
        sum += std::exp(-r) * std::min(1.0, d);
    }
    return {h * sum, std::exp(-r_max)};
}

} // namespace rwre
