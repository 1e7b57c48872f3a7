#ifndef RWRE_ENVIRONMENT_HPP
#define RWRE_ENVIRONMENT_HPP

#include "rwre/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rwre {

class EnvironmentError : public std::runtime_error {
public:
    explicit EnvironmentError(const std::string& what) : std::runtime_error(what) {}
};

struct Edge {
    std::size_t a = 0;
    std::size_t b = 0;
    double conductance = 1.0;
};

struct Neighbor {
    std::size_t cell = 0;
    double conductance = 1.0;
};

// Lattice carried by face configurations: vertices, lattice edges, and each
// face's boundary cycle of vertex indices (counterclockwise).
struct LatticeData {
    std::vector<Point> vertices;
    std::vector<Edge> edges;
    std::vector<std::vector<std::size_t>> face_vertices;
};

struct GeneratorMeta {
    std::string generator = "custom";
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> params;
};

enum class ViolationKind {
    NonpositiveConductance,
    AsymmetricConductance,
    SelfLoop,
    DuplicateEdge,
    Overlap,
    AdjacentDisjoint,
    DisconnectedAlongLine,
};

std::string to_string(ViolationKind k);

struct Violation {
    ViolationKind kind;
    std::size_t a = 0;
    std::size_t b = 0;
    double value = 0.0;
    std::string detail;
};

struct CellStats {
    double area = 0.0;
    double diameter = 0.0;
    double pi = 0.0;
    double pi_star = 0.0;
    std::size_t degree = 0;
};

struct ConfigOptions {
    // The window is the whole domain (no cells exist outside it), so nothing
    // is frozen and masses near the window edge are exact.
    bool bounded = false;
    bool check_simple = true;
};

class CellConfiguration {
public:
    CellConfiguration() = default;
    CellConfiguration(std::vector<Region> regions, std::vector<Edge> edges, Square window, ConfigOptions opts = {},
                      std::vector<std::int64_t> ids = {});

    std::size_t size() const { return regions_.size(); }
    bool empty() const { return regions_.empty(); }

    const Region& region(std::size_t i) const { return regions_.at(i); }
    std::int64_t id(std::size_t i) const { return ids_.at(i); }
    const std::vector<std::int64_t>& ids() const { return ids_; }
    std::optional<std::size_t> index_of(std::int64_t id) const;

    double area(std::size_t i) const { return area_[i]; }
    const Point& centroid(std::size_t i) const { return centroid_[i]; }
    double diameter(std::size_t i) const { return diameter_[i]; }
    const Box& bbox(std::size_t i) const { return bbox_[i]; }
    double pi(std::size_t i) const { return pi_[i]; }
    double pi_star(std::size_t i) const { return pi_star_[i]; }
    std::size_t degree(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
    double holding_time(std::size_t i) const { return hold_[i]; }
    CellStats stats(std::size_t i) const;

    const Neighbor* neighbors_begin(std::size_t i) const { return adj_.data() + offsets_[i]; }
    const Neighbor* neighbors_end(std::size_t i) const { return adj_.data() + offsets_[i + 1]; }
    std::vector<Neighbor> neighbors(std::size_t i) const
    {
        return {neighbors_begin(i), neighbors_end(i)};
    }
    const std::vector<Edge>& edges() const { return edges_; }
    // Conductance between i and j, or 0 if not adjacent.
    double conductance(std::size_t i, std::size_t j) const;

    const Square& window() const { return window_; }
    bool bounded() const { return bounded_; }
    bool frozen(std::size_t i) const { return frozen_[i] != 0; }

    // Findings about the declared edge list (self-loops, duplicates,
    // mismatched reverse declarations); validate() reports them.
    const std::vector<Violation>& construction_issues() const { return issues_; }

    // Cells whose bounding boxes overlap the query box.
    std::vector<std::size_t> candidates(const Box& b) const;
    std::vector<std::size_t> cells_meeting(const Square& s, double tol = kGeomTol) const;
    std::vector<std::size_t> cells_meeting_boundary(const Square& s, double tol = kGeomTol) const;
    std::vector<std::size_t> cells_meeting_disk(const Point& c, double r, double tol = kGeomTol) const;
    std::vector<std::size_t> cells_meeting_segment(const Point& a, const Point& b, double tol = kGeomTol) const;
    // Cell containing p (half-open on shared edges); nullopt outside all cells.
    std::optional<std::size_t> cell_containing(const Point& p) const;

    const std::optional<LatticeData>& lattice() const { return lattice_; }
    void set_lattice(LatticeData l);
    const GeneratorMeta& meta() const { return meta_; }
    void set_meta(GeneratorMeta m) { meta_ = std::move(m); }

    // Copy with every region mapped by z -> scale * z + shift.
    CellConfiguration transformed(double scale, const Point& shift) const;

private:
    void build_index();

    std::vector<Region> regions_;
    std::vector<std::int64_t> ids_;
    std::vector<Edge> edges_;
    Square window_;
    bool bounded_ = false;

    std::vector<double> area_;
    std::vector<Point> centroid_;
    std::vector<double> diameter_;
    std::vector<Box> bbox_;
    std::vector<double> pi_;
    std::vector<double> pi_star_;
    std::vector<double> hold_;
    std::vector<unsigned char> frozen_;

    std::vector<std::size_t> offsets_;
    std::vector<Neighbor> adj_;

    std::vector<Violation> issues_;

    // Uniform bucket grid over the cells' bounding boxes.
    Point grid_origin_{0.0, 0.0};
    double grid_cell_ = 1.0;
    long grid_nx_ = 0;
    long grid_ny_ = 0;
    std::vector<std::size_t> bucket_offsets_;
    std::vector<std::size_t> bucket_items_;

    std::optional<LatticeData> lattice_;
    GeneratorMeta meta_;
};

double pi(const CellConfiguration& c, std::size_t cell);
double pi_star(const CellConfiguration& c, std::size_t cell);

// Cells meeting the closed box, with induced adjacency. Window and bounded
// flag are inherited; ids are preserved.
CellConfiguration restrict(const CellConfiguration& c, const Square& box);
std::vector<std::size_t> boundary_cells(const CellConfiguration& c, const Square& box);

struct Segment {
    Point a;
    Point b;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::size_t cells = 0;
    std::size_t edges = 0;
    std::size_t lines_checked = 0;
    std::size_t lines_connected = 0;

    bool ok() const { return violations.empty(); }
    std::size_t count(ViolationKind k) const;
};

ValidationReport validate(const CellConfiguration& c, const std::vector<Segment>* lines = nullptr);

// Horizontal and vertical lattice lines through the window at the given spacing.
std::vector<Segment> lattice_lines(const Square& window, double spacing, double inset = 0.0);

struct MomentReport {
    std::size_t cells = 0;
    double weight = 0.0;
    double mean_diam2_pi_over_area = 0.0;
    double mean_diam2_pistar_over_area = 0.0;
    // Vertex versions (Outrad^2 pi(x) summed over boundary vertices); NaN without lattice data.
    double mean_outrad2_pi_over_area = 0.0;
    double mean_outrad2_pistar_over_area = 0.0;
    double max_diameter_over_side = 0.0;
};

// Averages weighted by Area(H ∩ window) over cells meeting the window.
MomentReport moment_stats(const CellConfiguration& c, const Square& window);

} // namespace rwre

#endif
