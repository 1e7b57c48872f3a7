#ifndef RWRE_DYADIC_HPP
#define RWRE_DYADIC_HPP

#include "rwre/environment.hpp"
#include "rwre/rng.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace rwre {

class DyadicError : public std::runtime_error {
public:
    explicit DyadicError(const std::string& what) : std::runtime_error(what) {}
};

// Square of the system at `level`, addressed on that level's lattice:
// anchor = anchor(S_level) + side(level) * (i, j). Exact identity.
struct DyadicSquare {
    int level = 0;
    std::int64_t i = 0;
    std::int64_t j = 0;

    friend bool operator==(const DyadicSquare& a, const DyadicSquare& b)
    {
        return a.level == b.level && a.i == b.i && a.j == b.j;
    }
    friend bool operator!=(const DyadicSquare& a, const DyadicSquare& b) { return !(a == b); }
    friend bool operator<(const DyadicSquare& a, const DyadicSquare& b)
    {
        if (a.level != b.level)
            return a.level < b.level;
        if (a.i != b.i)
            return a.i < b.i;
        return a.j < b.j;
    }
};

class DyadicSystem2D {
public:
    static constexpr int kMaxExponent = 500;

    // s in [0,1), w in [0, 2^s)^2; parent choices drawn from `seed`.
    DyadicSystem2D(double s, const Point& w, std::uint64_t seed);
    DyadicSystem2D(const DyadicSystem2D& o);
    DyadicSystem2D& operator=(const DyadicSystem2D& o);

    double s() const { return s_; }
    const Point& w() const { return w_; }
    std::uint64_t seed() const { return seed_; }

    double side(int k) const;
    // Corner of S_k occupied by S_{k-1}: bit 0 = right half, bit 1 = upper half.
    int child_corner(int k) const;
    Point level_anchor(int k) const;

    Square origin_square(int k) const;
    DyadicSquare containing(const Point& z, int k) const;
    Square square(const DyadicSquare& q) const;
    DyadicSquare parent(const DyadicSquare& q) const;
    std::array<DyadicSquare, 4> children(const DyadicSquare& q) const;
    // Level whose side lies in [x, 2x).
    int level_at_least(double x) const;

private:
    void check_level(int k) const;
    void extend_to(int k) const;

    double s_;
    Point w_;
    std::uint64_t seed_;
    // Lazily materialized anchors and child corners, indexed by k + kMaxExponent + 1.
    mutable std::mutex mutex_;
    mutable std::vector<Point> anchors_;
    mutable std::vector<int> corners_;
    mutable std::vector<char> known_;
};

DyadicSystem2D sample_uniform_2d(std::uint64_t seed);
Square origin_square(const DyadicSystem2D& d, int k);
Square containing_square(const DyadicSystem2D& d, const Point& z, int k);

class DyadicSystem1D {
public:
    DyadicSystem1D(double s, double w, std::uint64_t seed);

    double s() const { return s_; }
    double w() const { return w_; }
    double length(int k) const;
    // Interval I_k = [start, start + length(k)) containing 0.
    double start(int k) const;
    // Largest I_k with length <= a.
    int level_at_most(double a) const;

private:
    double s_;
    double w_;
    std::uint64_t seed_;
    mutable std::mutex mutex_;
    mutable std::map<int, double> starts_;
};

DyadicSystem1D sample_uniform_1d(std::uint64_t seed);

// Σ Area(H ∩ S) / Area(H) over cells meeting S.
double fractional_mass(const CellConfiguration& c, const Square& s);

struct MassSquare {
    DyadicSquare key;
    Square square;
    double mass = 0.0;
    // The answer reached the configured floor level rather than the mass threshold.
    bool at_floor = false;
    // Bounded domain: the answer is the first square covering the whole window.
    bool capped = false;
};

struct MassOptions {
    // Levels below level(sqrt(Area(H_z))) - floor_depth are not materialized.
    int floor_depth = 40;
};

MassSquare mass_square(const CellConfiguration& c, const DyadicSystem2D& d, const Point& z, double m,
                       MassOptions opts = {});

// The squares Ŝ_m^z for z in region; interiors pairwise disjoint, union covers region.
std::vector<MassSquare> partition(const CellConfiguration& c, const DyadicSystem2D& d, double m,
                                  const Square& region, MassOptions opts = {});

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

using PointFunctional = std::function<double(const CellConfiguration&, const DyadicSystem2D&, const Point&)>;

MeanEstimate ergodic_average(const CellConfiguration& c, const DyadicSystem2D& d, const PointFunctional& f, int k,
                             std::size_t n_samples, std::uint64_t seed);

// The environment seen from `origin` and dilated by `scale`: the point p of
// the placed plane is origin + p / scale in base coordinates.
struct PlacedEnvironment {
    std::shared_ptr<const CellConfiguration> base;
    Point origin{0.0, 0.0};
    double scale = 1.0;

    Point to_base(const Point& p) const { return origin + p / scale; }
    Point from_base(const Point& q) const { return scale * (q - origin); }
    std::optional<std::size_t> cell_at(const Point& p) const { return base->cell_containing(to_base(p)); }
    double area(std::size_t cell) const { return base->area(cell) * scale * scale; }
    // Same environment recentred at z and dilated by C.
    PlacedEnvironment transformed(double C, const Point& z) const { return {base, to_base(z), scale * C}; }
};

struct TransportRule {
    std::string name;
    std::function<double(const PlacedEnvironment&, const Point&, const Point&)> evaluate;
};

using EnvironmentSampler = std::function<PlacedEnvironment(std::uint64_t index)>;

struct BalanceReport {
    double out_mean = 0.0;  // E ∫ F(H, 0, w) dw
    double out_se = 0.0;
    double in_mean = 0.0;   // E ∫ F(H, w, 0) dw
    double in_se = 0.0;
    double diff_se = 0.0;
    double z_score = 0.0;
    std::size_t samples = 0;
    bool support_warning = false;
};

BalanceReport mass_transport_check(const EnvironmentSampler& sampler, const TransportRule& rule, std::size_t n_envs,
                                   std::size_t n_points, double radius, std::uint64_t seed);

// |F(C(H - z), C(w0 - z), C(w1 - z)) - C^{-2} F(H, w0, w1)|.
double covariance_defect(const TransportRule& rule, const PlacedEnvironment& env, double C, const Point& z,
                         const Point& w0, const Point& w1);

// Origin uniform in `inner`; if normalize, dilate so the origin's cell has unit area.
EnvironmentSampler uniform_placement(std::shared_ptr<const CellConfiguration> base, const Square& inner,
                                     bool normalize, std::uint64_t seed);

TransportRule identity_transport();
// Mass of each cell spread uniformly over the adjacent cell to its right
// (the neighbor whose centroid is furthest in +x).
TransportRule right_neighbor_transport();
// Spreads over the disk of radius sqrt(Area(H_{w0})) around w0; `covariant`
// false drops the area normalization, which breaks dilation covariance.
TransportRule disk_transport(bool covariant);

} // namespace rwre

#endif
