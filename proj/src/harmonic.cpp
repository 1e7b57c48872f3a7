#include "rwre/harmonic.hpp"
#include "rwre/parallel.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>

namespace rwre {

Embedding phi0(const CellConfiguration& c)
{
    Embedding e;
    e.values.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        e.values[i] = c.centroid(i);
    e.label = "phi0";
    return e;
}

Embedding difference(const Embedding& g, const Embedding& f)
{
    if (g.size() != f.size())
        throw HarmonicError("embeddings of different sizes");
    Embedding d;
    d.values.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        d.values[i] = g[i] - f[i];
    d.label = "custom";
    return d;
}

std::vector<char> cells_mask(const CellConfiguration& c, const Square& s)
{
    std::vector<char> mask(c.size(), 0);
    for (std::size_t i : c.cells_meeting(s))
        mask[i] = 1;
    return mask;
}

namespace {

template <typename Diff>
double edge_sum(const CellConfiguration& c, const std::vector<char>* mask, Diff&& diff)
{
    double e = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (mask && !(*mask)[i])
            continue;
        for (auto it = c.neighbors_begin(i); it != c.neighbors_end(i); ++it) {
            if (it->cell <= i || (mask && !(*mask)[it->cell]))
                continue;
            e += it->conductance * diff(i, it->cell);
        }
    }
    return e;
}

void check_size(const CellConfiguration& c, std::size_t n)
{
    if (n != c.size())
        throw HarmonicError("field does not cover every cell");
}

} // namespace

double dirichlet_energy(const CellConfiguration& c, const std::vector<double>& f, const std::vector<char>* mask)
{
    check_size(c, f.size());
    return edge_sum(c, mask, [&](std::size_t a, std::size_t b) { return (f[a] - f[b]) * (f[a] - f[b]); });
}

double dirichlet_energy(const CellConfiguration& c, const Embedding& f, const std::vector<char>* mask)
{
    check_size(c, f.size());
    return edge_sum(c, mask, [&](std::size_t a, std::size_t b) { return (f[a] - f[b]).squaredNorm(); });
}

double dirichlet_energy(const CellConfiguration& c, const Embedding& f, const Square& box)
{
    const auto mask = cells_mask(c, box);
    return dirichlet_energy(c, f, &mask);
}

double dirichlet_inner(const CellConfiguration& c, const Embedding& f, const Embedding& g,
                       const std::vector<char>* mask)
{
    check_size(c, f.size());
    check_size(c, g.size());
    return edge_sum(c, mask, [&](std::size_t a, std::size_t b) { return (f[a] - f[b]).dot(g[a] - g[b]); });
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

class LocalSystem {
public:
    LocalSystem(const CellConfiguration& c, const std::vector<std::size_t>& free_cells) : c_(c), free_(free_cells)
    {
        local_.assign(c.size(), -1);
        for (std::size_t k = 0; k < free_.size(); ++k) {
            if (free_[k] >= c.size())
                throw HarmonicError("free cell out of range");
            if (local_[free_[k]] != -1)
                throw HarmonicError("free cell listed twice");
            local_[free_[k]] = static_cast<long>(k);
        }
        check_components();
        std::vector<Eigen::Triplet<double>> t;
        for (std::size_t k = 0; k < free_.size(); ++k) {
            const std::size_t i = free_[k];
            t.emplace_back(k, k, c.pi(i));
            for (auto it = c.neighbors_begin(i); it != c.neighbors_end(i); ++it)
                if (local_[it->cell] >= 0)
                    t.emplace_back(k, local_[it->cell], -it->conductance);
        }
        A_.resize(static_cast<long>(free_.size()), static_cast<long>(free_.size()));
        A_.setFromTriplets(t.begin(), t.end());
        A_.makeCompressed();
        cg_.compute(A_);
    }

    SolveResult solve(const std::vector<double>& values, const SolveOptions& opts)
    {
        check_size(c_, values.size());
        SolveResult res;
        res.field = values;
        if (free_.empty())
            return res;
        const long n = static_cast<long>(free_.size());
        Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd guess(n);
        for (long k = 0; k < n; ++k) {
            const std::size_t i = free_[k];
            for (auto it = c_.neighbors_begin(i); it != c_.neighbors_end(i); ++it)
                if (local_[it->cell] < 0)
                    b[k] += it->conductance * values[it->cell];
            guess[k] = values[i];
        }
        const long max_iter = opts.max_iter > 0 ? opts.max_iter : 50 * n;
        double eig_tol = std::max(opts.tol * 0.1, 1e-15);
        Eigen::VectorXd x = guess;
        for (int attempt = 0; attempt < 5; ++attempt) {
            cg_.setTolerance(eig_tol);
            cg_.setMaxIterations(max_iter);
            x = cg_.solveWithGuess(b, x);
            res.iterations += cg_.iterations();
            for (long k = 0; k < n; ++k)
                res.field[free_[k]] = x[k];
            res.residual = defect(res.field);
            if (res.residual <= opts.tol)
                return res;
            eig_tol = std::max(eig_tol * 1e-2, 1e-16);
        }
        char buf[128];
        std::snprintf(buf, sizeof buf, "Dirichlet solve did not converge: residual %.3g after %ld iterations",
                      res.residual, res.iterations);
        throw HarmonicError(buf);
    }

    std::vector<double> solve_rhs(const std::vector<double>& rhs, double tol)
    {
        const long n = static_cast<long>(free_.size());
        if (static_cast<long>(rhs.size()) != n)
            throw HarmonicError("right-hand side does not match the free cells");
        Eigen::VectorXd b(n);
        for (long k = 0; k < n; ++k)
            b[k] = rhs[k];
        cg_.setTolerance(tol);
        cg_.setMaxIterations(50 * std::max<long>(n, 1));
        const Eigen::VectorXd x = cg_.solve(b);
        const double rel = (A_ * x - b).norm() / std::max(b.norm(), 1e-300);
        if (!(rel <= 10.0 * tol))
            throw HarmonicError("Green's function solve did not converge");
        return {x.data(), x.data() + n};
    }

private:
    double defect(const std::vector<double>& f) const
    {
        double worst = 0.0, scale = 1.0;
        for (std::size_t i : free_) {
            double s = 0.0;
            scale = std::max(scale, std::abs(f[i]));
            for (auto it = c_.neighbors_begin(i); it != c_.neighbors_end(i); ++it) {
                s += it->conductance * f[it->cell];
                scale = std::max(scale, std::abs(f[it->cell]));
            }
            worst = std::max(worst, std::abs(f[i] - s / c_.pi(i)));
        }
        return worst / scale;
    }

    void check_components() const
    {
        std::vector<char> seen(free_.size(), 0);
        for (std::size_t s = 0; s < free_.size(); ++s) {
            if (seen[s])
                continue;
            bool anchored = false;
            std::deque<std::size_t> q{s};
            seen[s] = 1;
            while (!q.empty()) {
                const std::size_t k = q.front();
                q.pop_front();
                const std::size_t i = free_[k];
                if (c_.degree(i) == 0)
                    throw HarmonicError("isolated free cell " + std::to_string(c_.id(i)));
                for (auto it = c_.neighbors_begin(i); it != c_.neighbors_end(i); ++it) {
                    const long l = local_[it->cell];
                    if (l < 0) {
                        anchored = true;
                    } else if (!seen[static_cast<std::size_t>(l)]) {
                        seen[static_cast<std::size_t>(l)] = 1;
                        q.push_back(static_cast<std::size_t>(l));
                    }
                }
            }
            if (!anchored)
                throw HarmonicError("interior component without boundary contact (cell " +
                                    std::to_string(c_.id(free_[s])) + ")");
        }
    }

    const CellConfiguration& c_;
    std::vector<std::size_t> free_;
    std::vector<long> local_;
    SpMat A_;
    Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg_;
};

Embedding solve_embedding(const CellConfiguration& c, const std::vector<std::size_t>& free_cells,
                          const Embedding& boundary, const SolveOptions& opts)
{
    LocalSystem sys(c, free_cells);
    std::vector<double> bx(c.size()), by(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        bx[i] = boundary[i].x();
        by[i] = boundary[i].y();
    }
    const SolveResult rx = sys.solve(bx, opts);
    const SolveResult ry = sys.solve(by, opts);
    Embedding out = boundary;
    for (std::size_t i : free_cells)
        out.values[i] = Point(rx.field[i], ry.field[i]);
    out.residual = std::max(rx.residual, ry.residual);
    return out;
}

std::string mass_label(const char* name, double m)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s(%.6g)", name, m);
    return buf;
}

} // namespace

SolveResult solve_dirichlet_on(const CellConfiguration& c, const std::vector<std::size_t>& free_cells,
                               const std::vector<double>& values, const SolveOptions& opts)
{
    LocalSystem sys(c, free_cells);
    return sys.solve(values, opts);
}

SolveResult solve_dirichlet(const CellConfiguration& c, const std::vector<char>& fixed,
                            const std::vector<double>& values, const SolveOptions& opts)
{
    check_size(c, fixed.size());
    std::vector<std::size_t> free_cells;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (!fixed[i])
            free_cells.push_back(i);
    if (free_cells.size() == c.size())
        throw HarmonicError("boundary set is empty");
    return solve_dirichlet_on(c, free_cells, values, opts);
}

std::vector<double> solve_green(const CellConfiguration& c, const std::vector<std::size_t>& free_cells,
                                const std::vector<double>& rhs, double tol)
{
    LocalSystem sys(c, free_cells);
    return sys.solve_rhs(rhs, tol);
}

std::vector<std::size_t> square_interior_cells(const CellConfiguration& c, const Square& s)
{
    std::vector<char> bnd(c.size(), 0);
    for (std::size_t i : c.cells_meeting_boundary(s))
        bnd[i] = 1;
    std::vector<std::size_t> out;
    for (std::size_t i : c.cells_meeting(s))
        if (!bnd[i] && !c.frozen(i))
            out.push_back(i);
    std::sort(out.begin(), out.end());
    return out;
}

Embedding harmonic_in_square(const CellConfiguration& c, const Square& s, const Embedding& boundary,
                             const SolveOptions& opts)
{
    check_size(c, boundary.size());
    return solve_embedding(c, square_interior_cells(c, s), boundary, opts);
}

Embedding phi_m(const CellConfiguration& c, const DyadicSystem2D& d, double m, const Square& region,
                const SolveOptions& opts)
{
    const auto squares = partition(c, d, m, region);
    const Embedding base = phi0(c);
    Embedding out = base;
    std::vector<double> residuals(squares.size(), 0.0);
    SolveOptions inner = opts;
    inner.threads = 1;
    parallel_for(squares.size(), opts.threads, [&](std::size_t q) {
        const auto free_cells = square_interior_cells(c, squares[q].square);
        if (free_cells.empty())
            return;
        const Embedding e = solve_embedding(c, free_cells, base, inner);
        // Free cells of distinct squares are disjoint.
        for (std::size_t i : free_cells)
            out.values[i] = e[i];
        residuals[q] = e.residual;
    });
    out.residual = residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
    out.label = mass_label("phi_m", m);
    return out;
}

SpecificEnergy specific_energy(const CellConfiguration& c, const Embedding& f, const Embedding& g,
                               const Square& region)
{
    const Embedding h = difference(g, f);
    const auto mask = cells_mask(c, region);
    SpecificEnergy se;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!mask[i])
            continue;
        double local = 0.0;
        for (auto it = c.neighbors_begin(i); it != c.neighbors_end(i); ++it)
            if (mask[it->cell])
                local += it->conductance * (h[i] - h[it->cell]).squaredNorm();
        if (local == 0.0)
            continue;
        const double a = clipped_area(c.region(i), region);
        // density local / (2a) integrated over H ∩ square
        if (a > 0.0)
            se.integral += 0.5 * local;
    }
    se.mean = se.integral / (region.side * region.side);
    se.energy = dirichlet_energy(c, h, &mask);
    const double scale = std::max(se.energy, se.integral);
    se.rel_gap = scale > 0.0 ? std::abs(se.energy - se.integral) / scale : 0.0;
    return se;
}

DecompositionReport energy_decomposition(const CellConfiguration& c, const DyadicSystem2D& d, const Square& region,
                                         double m_first, double m_max, const SolveOptions& opts)
{
    if (!(m_first > 0.0) || !(m_max >= m_first))
        throw HarmonicError("mass ladder needs 0 < m_first <= m_max");
    DecompositionReport rep;
    for (double m = m_first; m <= m_max * (1.0 + 1e-12); m *= 2.0)
        rep.masses.push_back(m);
    const auto mask = cells_mask(c, region);
    const Embedding base = phi0(c);
    rep.phi0_energy = dirichlet_energy(c, base, &mask);
    std::vector<Embedding> inc;
    Embedding prev = base;
    for (double m : rep.masses) {
        Embedding cur = phi_m(c, d, m, region, opts);
        rep.max_residual = std::max(rep.max_residual, cur.residual);
        rep.phi_energies.push_back(dirichlet_energy(c, cur, &mask));
        inc.push_back(difference(cur, prev));
        rep.increments.push_back(dirichlet_energy(c, inc.back(), &mask));
        prev = std::move(cur);
    }
    for (double e : rep.increments)
        rep.sum += e;
    rep.direct = dirichlet_energy(c, difference(prev, base), &mask);
    const double scale = std::max(rep.direct, rep.sum);
    rep.rel_gap = scale > 0.0 ? std::abs(rep.direct - rep.sum) / scale : 0.0;
    for (std::size_t i = 0; i < inc.size(); ++i)
        for (std::size_t j = i + 1; j < inc.size(); ++j) {
            const double gm = std::sqrt(rep.increments[i] * rep.increments[j]);
            if (gm <= 0.0)
                continue;
            rep.max_inner_ratio = std::max(rep.max_inner_ratio, std::abs(dirichlet_inner(c, inc[i], inc[j], &mask)) / gm);
        }
    return rep;
}

CorrectorResult corrector_approx(const CellConfiguration& c, const Square& region, const SolveOptions& opts)
{
    const Embedding base = phi0(c);
    CorrectorResult res;
    res.mass = fractional_mass(c, region);
    res.phi = harmonic_in_square(c, region, base, opts);
    res.phi.label = mass_label("corrector_approx", res.mass);

    Embedding quarter = base;
    const double h = 0.5 * region.side;
    for (int q = 0; q < 4; ++q) {
        const Square s{region.anchor + h * Point(q & 1, q >> 1), h};
        const auto free_cells = square_interior_cells(c, s);
        if (free_cells.empty())
            continue;
        const Embedding e = solve_embedding(c, free_cells, base, opts);
        for (std::size_t i : free_cells)
            quarter.values[i] = e[i];
    }
    const auto mask = cells_mask(c, region);
    res.tail_proxy = dirichlet_energy(c, difference(res.phi, quarter), &mask) / (region.side * region.side);
    return res;
}

std::vector<RadiusRatio> sublinearity_profile(const CellConfiguration& c, const Embedding& embedding,
                                              const Embedding& reference, const std::vector<double>& radii,
                                              const Point& center)
{
    check_size(c, embedding.size());
    check_size(c, reference.size());
    std::vector<RadiusRatio> out;
    for (double r : radii) {
        if (!(r > 0.0))
            throw HarmonicError("radii must be positive");
        double sup = 0.0;
        for (std::size_t i : c.cells_meeting_disk(center, r))
            sup = std::max(sup, (embedding[i] - reference[i]).norm());
        out.push_back({r, sup / r});
    }
    return out;
}

PathVariation path_variation_check(const CellConfiguration& c, const Embedding& f, const Square& box, int n_lines)
{
    check_size(c, f.size());
    if (n_lines < 1)
        throw HarmonicError("need at least one line");
    const auto mask = cells_mask(c, box);
    PathVariation pv;
    std::vector<char> on(c.size(), 0);
    double total = 0.0;
    for (int k = 0; k < n_lines; ++k) {
        const double y = box.anchor.y() + (k + 0.5) / n_lines * box.side;
        const auto cells =
            c.cells_meeting_segment(Point(box.anchor.x(), y), Point(box.anchor.x() + box.side, y));
        for (std::size_t i : cells)
            on[i] = mask[i];
        for (std::size_t i : cells) {
            if (!on[i])
                continue;
            for (auto it = c.neighbors_begin(i); it != c.neighbors_end(i); ++it)
                if (it->cell > i && on[it->cell])
                    total += (f[i] - f[it->cell]).norm();
        }
        for (std::size_t i : cells)
            on[i] = 0;
    }
    pv.lhs = total / n_lines;
    pv.rhs = std::sqrt(dirichlet_energy(c, f, &mask));
    pv.constant = pv.rhs > 0.0 ? pv.lhs / pv.rhs : 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (mask[i])
            s += c.diameter(i) * c.diameter(i) * c.pi_star(i);
    pv.bound = 2.0 * std::sqrt(s) / box.side;
    return pv;
}

namespace {

// Point of cell ∩ boundary(domain) closest to p; falls back to the closest
// boundary point when the cell only touches the boundary within tolerance.
Point boundary_point_in_cell(const Region& cell, const Region& domain, const Point& p)
{
    Point best = p, fallback = p;
    double bd = INFINITY, fd = INFINITY;
    auto offer = [&](const Point& q) {
        const double d = (q - p).squaredNorm();
        if (d < bd && point_region_distance(cell, q) <= kGeomTol) {
            bd = d;
            best = q;
        }
    };
    for_each_edge(domain, [&](const Point& a, const Point& b) {
        const Point q = closest_point_on_segment(p, a, b);
        const double dq = (q - p).squaredNorm();
        if (dq < fd) {
            fd = dq;
            fallback = q;
        }
        offer(q);
        offer(a);
        const Point ab = b - a;
        for_each_edge(cell, [&](const Point& c, const Point& d) {
            const Point cd = d - c;
            const double den = ab.x() * cd.y() - ab.y() * cd.x();
            if (den == 0.0)
                return;
            const Point ac = c - a;
            const double t = (ac.x() * cd.y() - ac.y() * cd.x()) / den;
            const double u = (ac.x() * ab.y() - ac.y() * ab.x()) / den;
            if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0)
                offer(a + t * ab);
        });
    });
    return bd < INFINITY ? best : fallback;
}

void check_sigma_harmonic(const Region& domain, const ScalarField& f, const Eigen::Matrix2d& sigma)
{
    const Box bb = region_bbox(domain);
    const double diam = (bb.hi - bb.lo).norm();
    const double h = 1e-3 * diam;
    double fmax = 1.0;
    std::vector<Point> pts;
    for (int i = 1; i < 8; ++i)
        for (int j = 1; j < 8; ++j) {
            const Point p = bb.lo + Point(i / 8.0 * (bb.hi.x() - bb.lo.x()), j / 8.0 * (bb.hi.y() - bb.lo.y()));
            if (point_in_region(domain, p) && boundary_distance(domain, p) > 2.0 * h)
                pts.push_back(p);
        }
    for (const Point& p : pts)
        fmax = std::max(fmax, std::abs(f(p)));
    for (const Point& p : pts) {
        const Point ex(h, 0.0), ey(0.0, h);
        const double f0 = f(p);
        const double fxx = (f(p + ex) - 2.0 * f0 + f(p - ex)) / (h * h);
        const double fyy = (f(p + ey) - 2.0 * f0 + f(p - ey)) / (h * h);
        const double fxy = (f(p + ex + ey) - f(p + ex - ey) - f(p - ex + ey) + f(p - ex - ey)) / (4.0 * h * h);
        const double tr = sigma(0, 0) * fxx + 2.0 * sigma(0, 1) * fxy + sigma(1, 1) * fyy;
        if (std::abs(tr) > 1e-4 * sigma.norm() * fmax / (diam * diam))
            throw HarmonicError("f is not harmonic for the given covariance");
    }
}

} // namespace

std::vector<ExtensionError> harmonic_extension_compare(const CellConfiguration& c, const Region& domain,
                                                       const ScalarField& f, const Eigen::Matrix2d& sigma,
                                                       const std::vector<double>& scales, const SolveOptions& opts)
{
    check_sigma_harmonic(domain, f, sigma);
    std::vector<ExtensionError> out;
    for (double eps : scales) {
        if (!(eps > 0.0))
            throw HarmonicError("scales must be positive");
        const Region big = transformed_region(domain, 1.0 / eps, Point(0.0, 0.0));
        const Box bb = region_bbox(big);
        const Square win = c.window();
        if (!(win.contains_closed(bb.lo, -1.0) && win.contains_closed(bb.hi, -1.0)))
            throw HarmonicError("scaled domain leaves the window");
        std::vector<std::size_t> domain_cells, free_cells;
        std::vector<double> values(c.size(), 0.0);
        for (std::size_t i : c.candidates(bb)) {
            if (region_distance(c.region(i), big) > kGeomTol)
                continue;
            domain_cells.push_back(i);
            bool on_boundary = c.frozen(i);
            const Box cb = c.bbox(i);
            for_each_edge(big, [&](const Point& a, const Point& b) {
                if (on_boundary)
                    return;
                const Box eb{a.cwiseMin(b), a.cwiseMax(b)};
                if (eb.overlaps(cb, kGeomTol) && region_meets_segment(c.region(i), a, b))
                    on_boundary = true;
            });
            if (on_boundary)
                values[i] = f(eps * boundary_point_in_cell(c.region(i), big, c.centroid(i)));
            else
                free_cells.push_back(i);
        }
        std::sort(free_cells.begin(), free_cells.end());
        const SolveResult r = solve_dirichlet_on(c, free_cells, values, opts);
        ExtensionError e{eps, 0.0, domain_cells.size()};
        for (std::size_t i : free_cells)
            e.sup_error = std::max(e.sup_error, std::abs(r.field[i] - f(eps * c.centroid(i))));
        out.push_back(e);
    }
    return out;
}

} // namespace rwre
