#ifndef RWRE_GENERATORS_HPP
#define RWRE_GENERATORS_HPP

#include "rwre/environment.hpp"
#include "rwre/rng.hpp"

#include <optional>
#include <string>

namespace rwre {

class GeneratorError : public std::runtime_error {
public:
    explicit GeneratorError(const std::string& what) : std::runtime_error(what) {}
};

// i.i.d. conductance law. Text forms: "constant:c", "uniform:a:b", "two:a:b:p"
// (a with probability p, else b). A bare number means constant.
struct ConductanceLaw {
    enum class Kind { Constant, Uniform, TwoPoint };
    Kind kind = Kind::Constant;
    double a = 1.0;
    double b = 1.0;
    double p = 0.5;

    static ConductanceLaw parse(const std::string& text);
    std::string to_string() const;
    double sample(CounterRng& rng) const;
};

struct GeneratorSpec {
    // grid | split_grid | percolation | long_range | big_cell | two_scale
    std::string variant = "grid";
    int n = 16;                       // window side
    ConductanceLaw law;
    bool shift = false;               // grid: uniform random offset of the lattice
    std::optional<Point> anchor;      // window corner; default centres the window at 0
    std::uint64_t seed = 0;
    int k = 5;                        // split_grid
    double p = 0.5;                   // percolation
    int range = 1;                    // long_range N
    int big = 16;                     // big_cell: side of the big square

    void check() const;
    std::vector<std::pair<std::string, std::string>> params() const;
};

CellConfiguration generate(const GeneratorSpec& spec);

CellConfiguration gen_grid(const GeneratorSpec& spec);
// Unit square; lower half side 2^-k cells, upper half side 2^-(k+1). Bounded.
CellConfiguration gen_split_grid(int k);
CellConfiguration gen_percolation_faces(const GeneratorSpec& spec);
CellConfiguration gen_long_range(const GeneratorSpec& spec);
// Unit grid with the central big x big block merged into one cell.
CellConfiguration gen_big_cell(const GeneratorSpec& spec);
// Left half of the window tiled by side-2 squares, right half by unit squares.
CellConfiguration gen_two_scale(const GeneratorSpec& spec);

// One cell per lattice vertex, built by splitting each face into quads
// (centroid, edge midpoint, vertex, edge midpoint).
CellConfiguration vertex_cells(const CellConfiguration& faces);

} // namespace rwre

#endif
