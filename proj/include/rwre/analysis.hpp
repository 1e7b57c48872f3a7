#ifndef RWRE_ANALYSIS_HPP
#define RWRE_ANALYSIS_HPP

#include "rwre/geometry.hpp"

#include <string>
#include <vector>

namespace rwre {

class CellConfiguration;
struct Embedding;

class AnalysisError : public std::runtime_error {
public:
    explicit AnalysisError(const std::string& what) : std::runtime_error(what) {}
};

// Weighted atoms in the plane; weights positive and summing to 1.
struct EmpiricalMeasure {
    std::vector<Point> points;
    std::vector<double> weights;

    // Equal points are merged into one atom; each sample has weight 1/n.
    static EmpiricalMeasure from_samples(const std::vector<Point>& samples);
    void validate() const;
    std::size_t size() const { return points.size(); }
};

// Smallest ε (to tol, by bisection) with μ(A) <= ν(A^ε) + ε for every A;
// feasibility is a max-flow on the ε-neighbour graph.
double prokhorov_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double tol = 1e-4);
// Feasibility test used by the bisection.
bool prokhorov_at_most(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double eps);

// sup |F_n - F| against the uniform law on [0,1).
double ks_uniform(std::vector<double> samples);
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct BatchStats {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

// Mean and standard error of independent values.
BatchStats mean_stats(const std::vector<double>& values);
// Means of consecutive batches, then their standard error.
BatchStats batch_means(const std::vector<double>& values, std::size_t n_batches);

double median(std::vector<double> v);

// Reals at 17 significant digits.
std::string format_real(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& values);
    std::string str() const;
};

// Writes to a temporary file in the same directory, then renames.
void write_file_atomic(const std::string& path, const std::string& contents);
void write_csv(const std::string& path, const CsvTable& table);

struct SvgPolyline {
    std::vector<Point> points;
    std::string stroke = "#c0392b";
};

struct SvgScene {
    std::vector<Region> cells;
    std::vector<std::pair<Point, Point>> segments;
    std::vector<SvgPolyline> curves;
    std::vector<Square> squares;
    double width_px = 800.0;
};

SvgScene scene_from_environment(const CellConfiguration& c);
// Cells at their embedded positions: one dot per cell plus the adjacency segments.
SvgScene scene_from_embedding(const CellConfiguration& c, const Embedding& e);
std::string render_svg(const SvgScene& scene);

} // namespace rwre

#endif
