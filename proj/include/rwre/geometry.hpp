#ifndef RWRE_GEOMETRY_HPP
#define RWRE_GEOMETRY_HPP

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace rwre {

using Point = Eigen::Vector2d;
using Ring = std::vector<Point>;

class GeometryError : public std::runtime_error {
public:
    explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

// Absolute tolerance for intersection and incidence tests, in plane units.
constexpr double kGeomTol = 1e-9;

struct Box {
    Point lo{0.0, 0.0};
    Point hi{0.0, 0.0};

    bool overlaps(const Box& o, double tol = 0.0) const
    {
        return lo.x() <= o.hi.x() + tol && o.lo.x() <= hi.x() + tol && lo.y() <= o.hi.y() + tol &&
               o.lo.y() <= hi.y() + tol;
    }
};

struct Square {
    Point anchor{0.0, 0.0};
    double side = 1.0;

    Point center() const { return anchor + Point::Constant(0.5 * side); }
    Point far_corner() const { return anchor + Point::Constant(side); }
    Box box() const { return {anchor, far_corner()}; }
    // Half-open membership [a, a + side)^2.
    bool contains(const Point& p) const
    {
        return p.x() >= anchor.x() && p.y() >= anchor.y() && p.x() < anchor.x() + side &&
               p.y() < anchor.y() + side;
    }
    bool contains_closed(const Point& p, double tol = 0.0) const
    {
        return p.x() >= anchor.x() - tol && p.y() >= anchor.y() - tol && p.x() <= anchor.x() + side + tol &&
               p.y() <= anchor.y() + side + tol;
    }
    bool contains_square(const Square& o, double tol = 0.0) const
    {
        return contains_closed(o.anchor, tol) && contains_closed(o.far_corner(), tol);
    }
    // Counterclockwise corners starting at the anchor.
    std::vector<Point> corners() const;
    // Concentric square with `factor` times the side.
    Square scaled_about_center(double factor) const;
};

// One simply connected polygon with optional holes. After normalization the
// outer ring is counterclockwise and holes are clockwise.
struct Polygon {
    Ring outer;
    std::vector<Ring> holes;
};

struct Region {
    std::vector<Polygon> components;
};

struct TimedCurve {
    std::vector<double> times;
    std::vector<Point> points;

    std::size_t size() const { return points.size(); }
};

double ring_signed_area(const Ring& ring);

// Orients rings (outer counterclockwise, holes clockwise) and checks vertex
// counts, nonzero ring areas and ring simplicity. Throws GeometryError.
Region normalized_region(Region region, bool check_simple = true);
void validate_region(const Region& r, bool check_simple = true);
bool ring_is_simple(const Ring& ring);

Region square_region(const Square& s);
Region rect_region(const Point& lo, const Point& hi);
Region polygon_region(const Ring& outer);

double region_area(const Region& r);
Point region_centroid(const Region& r);
double region_diameter(const Region& r);
Box region_bbox(const Region& r);
std::size_t region_vertex_count(const Region& r);

// c * r + shift.
Region transformed_region(const Region& r, double scale, const Point& shift);

// Applies fn(a, b) to every directed boundary edge of every ring.
template <typename Fn>
void for_each_edge(const Region& r, Fn&& fn)
{
    auto ring_edges = [&](const Ring& ring) {
        const std::size_t n = ring.size();
        for (std::size_t i = 0; i < n; ++i)
            fn(ring[i], ring[(i + 1) % n]);
    };
    for (const auto& c : r.components) {
        ring_edges(c.outer);
        for (const auto& h : c.holes)
            ring_edges(h);
    }
}

double point_segment_distance(const Point& p, const Point& a, const Point& b);
double segment_segment_distance(const Point& a, const Point& b, const Point& c, const Point& d);
Point closest_point_on_segment(const Point& p, const Point& a, const Point& b);

// Parity test over all rings; points on the boundary may go either way.
bool point_in_region(const Region& r, const Point& p);
// Zero when p lies in the closed region.
double point_region_distance(const Region& r, const Point& p);
double boundary_distance(const Region& r, const Point& p);
double region_distance(const Region& a, const Region& b);

bool region_meets_square(const Region& r, const Square& s, double tol = kGeomTol);
bool region_meets_segment(const Region& r, const Point& a, const Point& b, double tol = kGeomTol);
bool region_meets_square_boundary(const Region& r, const Square& s, double tol = kGeomTol);
bool region_meets_disk(const Region& r, const Point& center, double radius, double tol = kGeomTol);

// Area of r intersected with a convex polygon given counterclockwise.
double clipped_area(const Region& r, const std::vector<Point>& convex_ccw);
double clipped_area(const Region& r, const Square& s);
// Area of the intersection of two regions (boundary-integral method).
double intersection_area(const Region& a, const Region& b);

// Fréchet distance of polylines by free-space decision and bisection.
double frechet_distance(const std::vector<Point>& p, const std::vector<Point>& q, double tol = 1e-10);
bool frechet_at_most(const std::vector<Point>& p, const std::vector<Point>& q, double eps);

TimedCurve make_curve(std::vector<double> times, std::vector<Point> points);
void validate_curve(const TimedCurve& c);

double dcmp(const TimedCurve& a, const TimedCurve& b);

struct LocalDistance {
    double value = 0.0;
    // e^{-r_max}: bound on the omitted part of the integral.
    double tail_bound = 0.0;
};

LocalDistance dcmp_loc(const TimedCurve& a, const TimedCurve& b, double r_max, int n_quad);

// Trace of the curve stopped at its first exit from the open disk B_r(0).
std::vector<Point> stopped_trace(const TimedCurve& c, double r);

} // namespace rwre

#endif
