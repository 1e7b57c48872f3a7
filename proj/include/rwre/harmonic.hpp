#ifndef RWRE_HARMONIC_HPP
#define RWRE_HARMONIC_HPP

#include "rwre/dyadic.hpp"
#include "rwre/environment.hpp"

#include <functional>
#include <string>
#include <vector>

namespace rwre {

class HarmonicError : public std::runtime_error {
public:
    explicit HarmonicError(const std::string& what) : std::runtime_error(what) {}
};

// Position per cell index. label: phi0, phi_m(<m>), corrector_approx(<M>), custom.
struct Embedding {
    std::vector<Point> values;
    std::string label = "custom";
    double residual = 0.0;

    const Point& operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
};

Embedding phi0(const CellConfiguration& c);
Embedding difference(const Embedding& g, const Embedding& f);

// Cells meeting the closed square.
std::vector<char> cells_mask(const CellConfiguration& c, const Square& s);

// Σ over edges with both ends in `mask` (all cells if null) of 𝔠|f(x) - f(y)|².
double dirichlet_energy(const CellConfiguration& c, const std::vector<double>& f,
                        const std::vector<char>* mask = nullptr);
double dirichlet_energy(const CellConfiguration& c, const Embedding& f, const std::vector<char>* mask = nullptr);
double dirichlet_energy(const CellConfiguration& c, const Embedding& f, const Square& box);
double dirichlet_inner(const CellConfiguration& c, const Embedding& f, const Embedding& g,
                       const std::vector<char>* mask = nullptr);

struct SolveOptions {
    double tol = 1e-10;
    // 0 means 50 times the number of unknowns.
    long max_iter = 0;
    unsigned threads = 1;
};

struct SolveResult {
    std::vector<double> field;
    // max over free cells of |f - π⁻¹Σ𝔠f'| divided by max(1, max |fixed value|)
    double residual = 0.0;
    long iterations = 0;
};

// Harmonic on cells with fixed[i] == 0, equal to values[i] elsewhere.
SolveResult solve_dirichlet(const CellConfiguration& c, const std::vector<char>& fixed,
                            const std::vector<double>& values, const SolveOptions& opts = {});
// Same on an explicit list of free cells; cells not listed keep `values`.
SolveResult solve_dirichlet_on(const CellConfiguration& c, const std::vector<std::size_t>& free_cells,
                               const std::vector<double>& values, const SolveOptions& opts = {});

// Solves (D - C) u = rhs on the listed free cells (rhs and result in list
// order), with u = 0 on every other cell.
std::vector<double> solve_green(const CellConfiguration& c, const std::vector<std::size_t>& free_cells,
                                const std::vector<double>& rhs, double tol = 1e-12);

// Free cells of a square solve: cells meeting s, minus those meeting its
// boundary, minus frozen cells.
std::vector<std::size_t> square_interior_cells(const CellConfiguration& c, const Square& s);

Embedding harmonic_in_square(const CellConfiguration& c, const Square& s, const Embedding& boundary,
                             const SolveOptions& opts = {});

Embedding phi_m(const CellConfiguration& c, const DyadicSystem2D& d, double m, const Square& region,
                const SolveOptions& opts = {});

struct SpecificEnergy {
    double integral = 0.0;  // ∫ over the square of the local density
    double mean = 0.0;      // integral / area
    double energy = 0.0;    // Energy(g - f; cells meeting the square)
    double rel_gap = 0.0;
};

// Local density at z in the square: Σ_{H'} 𝔠|Δ(g-f)|² / (2 Area(H_z ∩ square)).
SpecificEnergy specific_energy(const CellConfiguration& c, const Embedding& f, const Embedding& g,
                               const Square& region);

struct DecompositionReport {
    std::vector<double> masses;        // ladder m_1 < ... < m_J
    std::vector<double> increments;    // Energy(φ_{m_j} - φ_{m_{j-1}}), φ_{m_0} = φ₀
    std::vector<double> phi_energies;  // Energy(φ_{m_j})
    double phi0_energy = 0.0;
    double sum = 0.0;
    double direct = 0.0;               // Energy(φ_{m_J} - φ₀)
    double rel_gap = 0.0;
    // max over i < j of |<Δ_i, Δ_j>| / sqrt(E_i E_j)
    double max_inner_ratio = 0.0;
    double max_residual = 0.0;
};

// Ladder m_j = m_first * 2^j up to m_max; region should be a partition
// square of the largest mass so the chain of partitions refines inside it.
DecompositionReport energy_decomposition(const CellConfiguration& c, const DyadicSystem2D& d, const Square& region,
                                         double m_first, double m_max, const SolveOptions& opts = {});

struct CorrectorResult {
    Embedding phi;          // label corrector_approx(M)
    double mass = 0.0;      // fractional mass M of the region
    // Energy per area of φ_M - φ_{M/4}, the latter solved on the four quadrants.
    double tail_proxy = 0.0;
};

CorrectorResult corrector_approx(const CellConfiguration& c, const Square& region, const SolveOptions& opts = {});

struct RadiusRatio {
    double r = 0.0;
    double sup_ratio = 0.0;
};

// (1/r) sup over cells meeting B_r(center) of |embedding - reference|.
std::vector<RadiusRatio> sublinearity_profile(const CellConfiguration& c, const Embedding& embedding,
                                              const Embedding& reference, const std::vector<double>& radii,
                                              const Point& center = Point(0.0, 0.0));

struct PathVariation {
    double lhs = 0.0;
    double rhs = 0.0;       // Energy(f; cells meeting box)^(1/2)
    double constant = 0.0;  // lhs / rhs
    double bound = 0.0;     // 2 (Σ diam² π* / side²)^(1/2)
};

// Horizontal lines at heights (i + 1/2)/n_lines of the box.
PathVariation path_variation_check(const CellConfiguration& c, const Embedding& f, const Square& box, int n_lines);

struct ExtensionError {
    double scale = 0.0;
    double sup_error = 0.0;
    std::size_t cells = 0;
};

using ScalarField = std::function<double(const Point&)>;

// For each ε: solve on cells meeting ε⁻¹D with boundary data f at the point of
// εH ∩ ∂D nearest to ε centroid(H), and
// report sup over interior cells of |f^ε(H) - f(ε centroid(H))|.
// Throws if tr(Σ Hess f) is not small at sampled points of D.
std::vector<ExtensionError> harmonic_extension_compare(const CellConfiguration& c, const Region& domain,
                                                       const ScalarField& f, const Eigen::Matrix2d& sigma,
                                                       const std::vector<double>& scales,
                                                       const SolveOptions& opts = {});

} // namespace rwre

#endif
