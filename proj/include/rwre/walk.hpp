#ifndef RWRE_WALK_HPP
#define RWRE_WALK_HPP

#include "rwre/analysis.hpp"
#include "rwre/dyadic.hpp"
#include "rwre/harmonic.hpp"
#include "rwre/rng.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace rwre {

class WalkError : public std::runtime_error {
public:
    explicit WalkError(const std::string& what) : std::runtime_error(what) {}
};

// Y_0, Y_1, ... with jump_times[j] = τ_j; τ_0 = -θ and
// τ_{j+1} - τ_j = Area(Y_j) / π(Y_j).
struct WalkTrace {
    std::vector<std::size_t> cells;
    std::vector<double> jump_times;
    double theta = 0.0;
    // Time up to which the trace is known: τ_n + hold(Y_n) when the walk ran
    // out of horizon or steps, τ_n when it stopped on the frozen layer.
    double end_time = 0.0;
    bool truncated = false;

    std::size_t jumps() const { return cells.empty() ? 0 : cells.size() - 1; }
    // Cell occupied at time t (τ_0 <= t < end_time).
    std::size_t cell_at(double t) const;
};

std::size_t step(const CellConfiguration& c, std::size_t cell, CounterRng& rng);

struct WalkLimits {
    double horizon = INFINITY;              // stop once τ_{n+1} > horizon
    std::size_t max_steps = SIZE_MAX;
};

WalkTrace run_walk(const CellConfiguration& c, std::size_t start, const WalkLimits& limits, std::uint64_t seed,
                   bool stop_on_boundary, std::uint64_t stream = 0);

// Step curve: point j held on [τ_j, τ_{j+1}).
TimedCurve embed_walk(const WalkTrace& trace, const Embedding& e);
// Uniform point in each visited cell, drawn independently per jump.
TimedCurve embed_walk_uniform(const CellConfiguration& c, const WalkTrace& trace, std::uint64_t seed);
Point uniform_point_in_cell(const CellConfiguration& c, std::size_t cell, CounterRng& rng);

// Σ over jumps j >= 1 with τ_j <= T of (v · (φ(Y_j) - φ(Y_{j-1})))².
double quadratic_variation(const WalkTrace& trace, const Embedding& e, const Point& v, double T);
// Same over jumps with S < τ_j <= T.
double quadratic_variation(const WalkTrace& trace, const Embedding& e, const Point& v, double S, double T);

struct SigmaEstimate {
    double c_10 = 0.0, c_01 = 0.0, c_diag = 0.0;
    double se_10 = 0.0, se_01 = 0.0, se_diag = 0.0;
    double rho = 0.0, se_rho = 0.0;
    Eigen::Matrix2d sigma = Eigen::Matrix2d::Zero();
    // false when some c is within two standard errors of 0
    bool sigma_valid = false;
    std::size_t walks = 0;       // used
    std::size_t discarded = 0;   // touched the frozen layer before T
    double horizon = 0.0;
    bool boundary_warning = false;
};

struct SigmaOptions {
    // Starts uniform in the square of this side centred at `center`.
    double start_box = 1.0;
    Point center{0.0, 0.0};
    unsigned threads = 0;
};

SigmaEstimate estimate_sigma(const CellConfiguration& c, const Embedding& e, std::size_t n_walks, double T,
                             std::uint64_t seed, const SigmaOptions& opts = {});

struct JumpTruncation {
    double large_jumps = 0.0;   // T⁻¹ Σ Δ_j
    double compensator = 0.0;   // T⁻¹ Σ Δ̃_j
};

// Jumps with |v·Δφ| >= δ√T; the compensator uses all neighbours of Y_{j-1}.
JumpTruncation jump_truncation_stats(const CellConfiguration& c, const Embedding& e, const WalkTrace& trace,
                                     const Point& v, double delta, double T);

std::vector<std::size_t> loop_erase(const std::vector<std::size_t>& path);

// Walk from start until it enters `target`; returns the full path.
std::vector<std::size_t> walk_until(const CellConfiguration& c, std::size_t start, const std::vector<char>& target,
                                    CounterRng& rng, std::size_t max_steps = SIZE_MAX);

struct CouplingReport {
    double tv = 0.0;               // empirical TV of the two exit laws
    double tv_se = 0.0;
    double tv_exact = 0.0;         // from the two Green's function solves
    double disconnect = 0.0;       // P[X^x disconnects y from the target before hitting it]
    double disconnect_se = 0.0;
    double bound = 0.0;            // 1 - disconnect
    bool satisfied = false;        // tv_exact <= bound + 3 standard errors
    std::size_t samples = 0;
};

CouplingReport exit_coupling_tv(const CellConfiguration& c, std::size_t x, std::size_t y,
                                const std::vector<char>& target, std::size_t n_samples, std::uint64_t seed,
                                unsigned threads = 0);

// Exact exit law from `start` on the target set, by (D - C)u = e_start.
std::vector<double> exit_distribution(const CellConfiguration& c, std::size_t start, const std::vector<char>& target);

struct ExitLawReport {
    double distance = 0.0;
    std::size_t walk_atoms = 0;
    std::size_t samples = 0;
    Square enlarged;
};

// Exit points on the boundary of the concentric square of side 3|S| for the
// embedded walk (first crossing of the polygonal path) and for Σ-Brownian
// motion (walk on spheres), both in units of |S| about the square's centre.
ExitLawReport exit_law_prokhorov(const CellConfiguration& c, const Embedding& e, std::size_t start,
                                 const Square& s, const Eigen::Matrix2d& sigma, std::size_t n_samples,
                                 std::uint64_t seed, unsigned threads = 0);

// Σ-Brownian exit point from a convex polygon (counterclockwise), started at z.
Point brownian_exit_point(const std::vector<Point>& polygon, const Point& z, const Eigen::Matrix2d& sigma,
                          CounterRng& rng, double stop_distance);

struct RecurrenceRow {
    int r = 0;
    double energy = 0.0;
    double resistance_bound = 0.0;
    double oracle = 0.0;  // 2π / ((r - 1) ln 2)
};

// Test function of the logarithmic annulus around the centre of the origin
// square S_k, with |S_k| in [ℓ/2, ℓ), ℓ the side of the origin cell's area.
std::vector<RecurrenceRow> recurrence_resistance(const CellConfiguration& c, const DyadicSystem2D& d, int r_min,
                                                 int r_max);

struct ReturnReport {
    double fraction = 0.0;
    double median_steps = 0.0;
    std::size_t censored = 0;
    std::size_t excursions = 0;
};

ReturnReport return_time_stats(const CellConfiguration& c, std::size_t start, std::size_t n_excursions,
                               std::size_t step_cap, std::uint64_t seed, unsigned threads = 0);

// Two independent one-sided walks from the same cell glued at time 0; the
// backward part occupies (-∞, τ_0).
struct TwoSidedTrace {
    WalkTrace forward;
    std::vector<std::size_t> back_cells;   // Y_{-1}, Y_{-2}, ...
    std::vector<double> back_times;        // τ_{-1}, τ_{-2}, ...
};

TwoSidedTrace run_two_sided(const CellConfiguration& c, std::size_t start, double horizon, std::uint64_t seed);

using CellFunctional = std::function<double(const CellConfiguration&, std::size_t)>;

struct TimeAverage {
    double a = 0.0;
    double start = 0.0;
    double length = 0.0;
    double mean = 0.0;
};

// |Î_a|⁻¹ ∫ over Î_a of F(X_t) dt, Î_a the largest interval of d1 of length <= a.
std::vector<TimeAverage> walk_ergodic_average(const CellConfiguration& c, const DyadicSystem1D& d1,
                                              const TwoSidedTrace& trace, const CellFunctional& f,
                                              const std::vector<double>& a_levels);

} // namespace rwre

#endif
