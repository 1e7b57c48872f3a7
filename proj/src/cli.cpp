#include "rwre/cli.hpp"
#include "rwre/analysis.hpp"
#include "rwre/dyadic.hpp"
#include "rwre/generators.hpp"
#include "rwre/harmonic.hpp"
#include "rwre/io.hpp"
#include "rwre/walk.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <iostream>
#include <sstream>

namespace rwre {

namespace {

// Bad flag values found after parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Manifest {
    std::string command;
    std::vector<std::string> args;
    std::vector<std::pair<std::string, std::string>> params;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> outputs;
};

std::string utc_timestamp()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(const std::string& out_path, const Manifest& m)
{
    nlohmann::ordered_json j;
    j["artifact_version"] = kArtifactVersion;
    j["command"] = m.command;
    j["args"] = m.args;
    nlohmann::ordered_json p = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.params)
        p[k] = v;
    j["parameters"] = p;
    j["seeds"] = m.seeds;
    j["outputs"] = m.outputs;
    j["timestamp"] = utc_timestamp();
    write_file_atomic(out_path + ".manifest.json", j.dump(2) + "\n");
}

Point parse_point(const std::string& s)
{
    double x = 0, y = 0;
    char c = 0;
    std::istringstream in(s);
    if (!(in >> x >> c >> y) || c != ',')
        throw UsageError("expected x,y but got '" + s + "'");
    return {x, y};
}

Eigen::Matrix2d parse_sigma(const std::string& s)
{
    double a = 0, b = 0, d = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(s);
    if (!(in >> a >> c1 >> b >> c2 >> d) || c1 != ',' || c2 != ',')
        throw UsageError("--sigma expects s11,s12,s22");
    Eigen::Matrix2d m;
    m << a, b, b, d;
    return m;
}

std::size_t start_cell(const CellConfiguration& c, const Point& z)
{
    const auto cell = c.cell_containing(z);
    if (!cell)
        throw UsageError("start point lies outside every cell");
    return *cell;
}

Square centered_square(const Point& center, double side)
{
    return {center - Point::Constant(0.5 * side), side};
}

// Settings common to the environment-driven commands.
struct Common {
    std::string env;
    std::string out;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

void add_env(CLI::App* sub, Common& o, bool need_out = true)
{
    sub->add_option("--env", o.env, "environment file")->required();
    auto* opt = sub->add_option("-o,--out", o.out, "output file");
    if (need_out)
        opt->required();
    sub->add_option("--seed", o.seed, "random seed");
}

struct Options {
    unsigned threads = 0;

    // gen
    GeneratorSpec spec;
    std::string law = "constant:1";
    std::string anchor;
    std::string gen_out;

    Common com;

    // validate
    double line_spacing = 0.0;

    // embed
    std::string embed_kind = "phi0";
    double mass = 4.0;
    double region_side = 0.0;
    std::string region_center = "0,0";
    std::string svg;

    // energy
    double m_first = 1.0;
    double m_max = 64.0;

    // walk
    std::string start = "0,0";
    double horizon = 100.0;
    std::size_t max_steps = 1000000;
    std::size_t walks = 1;
    bool stop_on_boundary = true;

    // sigma
    double start_box = 1.0;
    std::string embedding_file;

    // recurrence
    int r_min = 3;
    int r_max = 8;

    // exit-law
    double side = 16.0;
    std::size_t samples = 10000;
    std::string sigma = "0.5,0,0.5";

    // transport-check
    std::string rule = "identity";
    std::size_t n_envs = 1000;
    std::size_t n_points = 16;
    double radius = 3.0;
    double margin = 4.0;
    bool normalize = true;

    // dcmp
    std::string curve_a;
    std::string curve_b;
    double r_max_loc = 0.0;
    int n_quad = 64;
};

Embedding load_or_phi0(const CellConfiguration& c, const std::string& path)
{
    if (path.empty())
        return phi0(c);
    return embedding_from_json(c, read_file(path));
}

int run_gen(Options& o, Manifest& m, std::ostream& out)
{
    if (!o.anchor.empty())
        o.spec.anchor = parse_point(o.anchor);
    try {
        o.spec.law = ConductanceLaw::parse(o.law);
        o.spec.check();
    } catch (const GeneratorError& e) {
        throw UsageError(e.what());
    }
    const CellConfiguration c = generate(o.spec);
    save_environment(o.gen_out, c);
    m.params = o.spec.params();
    m.seeds = {o.spec.seed};
    m.outputs = {o.gen_out};
    out << "cells " << c.size() << " edges " << c.edges().size() << "\n";
    write_manifest(o.gen_out, m);
    return 0;
}

int run_validate(Options& o, Manifest& m, std::ostream& out)
{
    const CellConfiguration c = load_environment(o.com.env);
    std::vector<Segment> lines;
    if (o.line_spacing > 0.0)
        lines = lattice_lines(c.window(), o.line_spacing, 0.5 * o.line_spacing);
    const ValidationReport rep = validate(c, o.line_spacing > 0.0 ? &lines : nullptr);
    const MomentReport mom = moment_stats(c, c.window());
    out << "cells " << rep.cells << " edges " << rep.edges << " violations " << rep.violations.size()
        << " lines " << rep.lines_connected << "/" << rep.lines_checked << "\n";
    out << "mean diam^2 pi/area " << format_real(mom.mean_diam2_pi_over_area) << "\n";
    if (!o.com.out.empty()) {
        CsvTable t;
        t.header = {"kind", "a", "b", "value", "detail"};
        for (const Violation& v : rep.violations)
            t.rows.push_back({to_string(v.kind), std::to_string(c.id(v.a)), std::to_string(c.id(v.b)),
                              format_real(v.value), v.detail});
        write_csv(o.com.out, t);
        m.outputs = {o.com.out};
        m.params = {{"line_spacing", format_real(o.line_spacing)}};
        write_manifest(o.com.out, m);
    }
    return rep.ok() ? 0 : 1;
}

Square region_of(const CellConfiguration& c, const Options& o)
{
    const double side = o.region_side > 0.0 ? o.region_side : 0.5 * c.window().side;
    return centered_square(parse_point(o.region_center), side);
}

int run_embed(Options& o, Manifest& m, std::ostream& out)
{
    const CellConfiguration c = load_environment(o.com.env);
    SolveOptions so;
    so.threads = o.threads;
    Embedding e;
    const Square region = region_of(c, o);
    if (o.embed_kind == "phi0") {
        e = phi0(c);
    } else if (o.embed_kind == "phi_m") {
        const DyadicSystem2D d = sample_uniform_2d(o.com.seed);
        e = phi_m(c, d, o.mass, region, so);
    } else if (o.embed_kind == "corrector") {
        e = corrector_approx(c, region, so).phi;
    } else {
        throw UsageError("--kind must be phi0, phi_m or corrector");
    }
    write_file_atomic(o.com.out, embedding_to_json(c, e));
    m.outputs = {o.com.out};
    if (!o.svg.empty()) {
        write_file_atomic(o.svg, render_svg(scene_from_embedding(c, e)));
        m.outputs.push_back(o.svg);
    }
    m.params = {{"kind", o.embed_kind}, {"mass", format_real(o.mass)}, {"region_side", format_real(region.side)}};
    m.seeds = {o.com.seed};
    out << e.label << " residual " << format_real(e.residual) << "\n";
    write_manifest(o.com.out, m);
    return 0;
}

int run_energy(Options& o, Manifest& m, std::ostream& out)
{
    const CellConfiguration c = load_environment(o.com.env);
    const DyadicSystem2D d = sample_uniform_2d(o.com.seed);
    const Square region = mass_square(c, d, parse_point(o.region_center), o.m_max).square;
    SolveOptions so;
    so.threads = o.threads;
    const DecompositionReport rep = energy_decomposition(c, d, region, o.m_first, o.m_max, so);
    CsvTable t;
    t.header = {"mass", "increment", "phi_energy"};
    for (std::size_t j = 0; j < rep.masses.size(); ++j)
        t.add_row({rep.masses[j], rep.increments[j], rep.phi_energies[j]});
    write_csv(o.com.out, t);
    out << "phi0 " << format_real(rep.phi0_energy) << " sum " << format_real(rep.sum) << " direct "
        << format_real(rep.direct) << " rel_gap " << format_real(rep.rel_gap) << "\n";
    m.params = {{"m_first", format_real(o.m_first)},
                {"m_max", format_real(o.m_max)},
                {"region_side", format_real(region.side)},
                {"rel_gap", format_real(rep.rel_gap)}};
    m.seeds = {o.com.seed};
    m.outputs = {o.com.out};
    write_manifest(o.com.out, m);
    return 0;
}

int run_walk_cmd(Options& o, Manifest& m, std::ostream& out)
{
    const CellConfiguration c = load_environment(o.com.env);
    const std::size_t s = start_cell(c, parse_point(o.start));
    if (o.walks == 0)
        throw UsageError("--walks must be positive");
    CsvTable t;
    t.header = {"walk", "jump", "cell_id", "time"};
    SvgScene scene = scene_from_environment(c);
    std::size_t truncated = 0;
    for (std::size_t w = 0; w < o.walks; ++w) {
        const WalkTrace tr = run_walk(c, s, {o.horizon, o.max_steps}, o.com.seed, o.stop_on_boundary, w);
        truncated += tr.truncated;
        for (std::size_t j = 0; j < tr.cells.size(); ++j)
            t.rows.push_back({std::to_string(w), std::to_string(j), std::to_string(c.id(tr.cells[j])),
                              format_real(tr.jump_times[j])});
        t.rows.push_back({std::to_string(w), "end", std::to_string(c.id(tr.cells.back())), format_real(tr.end_time)});
        if (!o.svg.empty()) {
            SvgPolyline pl;
            for (std::size_t cell : tr.cells)
                pl.points.push_back(c.centroid(cell));
            scene.curves.push_back(std::move(pl));
        }
    }
    write_csv(o.com.out, t);
    m.outputs = {o.com.out};
    if (!o.svg.empty()) {
        write_file_atomic(o.svg, render_svg(scene));
        m.outputs.push_back(o.svg);
    }
    out << "walks " << o.walks << " stopped on frozen layer " << truncated << "\n";
    m.params = {{"start", o.start}, {"horizon", format_real(o.horizon)}, {"walks", std::to_string(o.walks)}};
    m.seeds = {o.com.seed};
    write_manifest(o.com.out, m);
    return 0;
}

int run_sigma(Options& o, Manifest& m, std::ostream& out, std::ostream& err)
{
    const CellConfiguration c = load_environment(o.com.env);
    const Embedding e = load_or_phi0(c, o.embedding_file);
    SigmaOptions so;
    so.start_box = o.start_box;
    so.threads = o.threads;
    const SigmaEstimate s = estimate_sigma(c, e, o.walks, o.horizon, o.com.seed, so);
    CsvTable t;
    t.header = {"c_10",    "c_01",  "c_diag", "rho",   "se_10",     "se_01",      "se_diag",
                "se_rho",  "walks", "discarded", "horizon", "sigma_valid"};
    t.add_row({s.c_10, s.c_01, s.c_diag, s.rho, s.se_10, s.se_01, s.se_diag, s.se_rho,
               static_cast<double>(s.walks), static_cast<double>(s.discarded), s.horizon,
               s.sigma_valid ? 1.0 : 0.0});
    write_csv(o.com.out, t);
    out << "c_10 " << format_real(s.c_10) << " c_01 " << format_real(s.c_01) << " rho " << format_real(s.rho)
        << "\n";
    if (s.boundary_warning)
        err << "warning: " << s.discarded << " of " << o.walks << " walks reached the frozen layer\n";
    m.params = {{"walks", std::to_string(o.walks)},
                {"horizon", format_real(o.horizon)},
                {"start_box", format_real(o.start_box)},
                {"embedding", o.embedding_file.empty() ? "phi0" : o.embedding_file}};
    m.seeds = {o.com.seed};
    m.outputs = {o.com.out};
    write_manifest(o.com.out, m);
    if (!s.sigma_valid) {
        err << "covariance refused: a quadratic variation constant is within two standard errors of 0\n";
        return 1;
    }
    return 0;
}

int run_recurrence(Options& o, Manifest& m, std::ostream& out)
{
    const CellConfiguration c = load_environment(o.com.env);
    const DyadicSystem2D d = sample_uniform_2d(o.com.seed);
    const auto rows = recurrence_resistance(c, d, o.r_min, o.r_max);
    CsvTable t;
    t.header = {"r", "energy", "resistance_bound", "oracle"};
    for (const auto& r : rows)
        t.add_row({static_cast<double>(r.r), r.energy, r.resistance_bound, r.oracle});
    write_csv(o.com.out, t);
    out << rows.size() << " rows\n";
    m.params = {{"r_min", std::to_string(o.r_min)}, {"r_max", std::to_string(o.r_max)}};
    m.seeds = {o.com.seed};
    m.outputs = {o.com.out};
    write_manifest(o.com.out, m);
    return 0;
}

int run_exit_law(Options& o, Manifest& m, std::ostream& out)
{
    const CellConfiguration c = load_environment(o.com.env);
    const Embedding e = load_or_phi0(c, o.embedding_file);
    const Point center = parse_point(o.region_center);
    const Square s = centered_square(center, o.side);
    const ExitLawReport rep =
        exit_law_prokhorov(c, e, start_cell(c, center), s, parse_sigma(o.sigma), o.samples, o.com.seed, o.threads);
    CsvTable t;
    t.header = {"side", "distance", "walk_atoms", "samples"};
    t.add_row({o.side, rep.distance, static_cast<double>(rep.walk_atoms), static_cast<double>(rep.samples)});
    write_csv(o.com.out, t);
    out << "prokhorov " << format_real(rep.distance) << "\n";
    m.params = {{"side", format_real(o.side)}, {"samples", std::to_string(o.samples)}, {"sigma", o.sigma}};
    m.seeds = {o.com.seed};
    m.outputs = {o.com.out};
    write_manifest(o.com.out, m);
    return 0;
}

int run_transport(Options& o, Manifest& m, std::ostream& out)
{
    auto c = std::make_shared<const CellConfiguration>(load_environment(o.com.env));
    TransportRule rule;
    if (o.rule == "identity")
        rule = identity_transport();
    else if (o.rule == "neighbor")
        rule = right_neighbor_transport();
    else if (o.rule == "disk")
        rule = disk_transport(true);
    else if (o.rule == "disk-broken")
        rule = disk_transport(false);
    else
        throw UsageError("--rule must be identity, neighbor, disk or disk-broken");
    const Square& w = c->window();
    if (!(2.0 * o.margin < w.side))
        throw UsageError("--margin leaves no room inside the window");
    const Square inner{w.anchor + Point::Constant(o.margin), w.side - 2.0 * o.margin};
    const auto sampler = uniform_placement(c, inner, o.normalize, o.com.seed);
    const BalanceReport rep = mass_transport_check(sampler, rule, o.n_envs, o.n_points, o.radius, o.com.seed);
    CsvTable t;
    t.header = {"out_mean", "out_se", "in_mean", "in_se", "diff_se", "z_score", "samples"};
    t.add_row({rep.out_mean, rep.out_se, rep.in_mean, rep.in_se, rep.diff_se, rep.z_score,
               static_cast<double>(rep.samples)});
    write_csv(o.com.out, t);
    out << rule.name << " z " << format_real(rep.z_score) << "\n";
    m.params = {{"rule", o.rule},
                {"envs", std::to_string(o.n_envs)},
                {"points", std::to_string(o.n_points)},
                {"radius", format_real(o.radius)},
                {"margin", format_real(o.margin)}};
    m.seeds = {o.com.seed};
    m.outputs = {o.com.out};
    write_manifest(o.com.out, m);
    return 0;
}

int run_dcmp(Options& o, Manifest& m, std::ostream& out)
{
    const TimedCurve a = curve_from_csv(read_file(o.curve_a));
    const TimedCurve b = curve_from_csv(read_file(o.curve_b));
    CsvTable t;
    if (o.r_max_loc > 0.0) {
        const LocalDistance d = dcmp_loc(a, b, o.r_max_loc, o.n_quad);
        t.header = {"dcmp_loc", "tail_bound"};
        t.add_row({d.value, d.tail_bound});
        out << "dcmp_loc " << format_real(d.value) << "\n";
    } else {
        const double d = dcmp(a, b);
        t.header = {"dcmp"};
        t.add_row({d});
        out << "dcmp " << format_real(d) << "\n";
    }
    write_csv(o.com.out, t);
    m.params = {{"a", o.curve_a}, {"b", o.curve_b}, {"r_max", format_real(o.r_max_loc)}};
    m.outputs = {o.com.out};
    write_manifest(o.com.out, m);
    return 0;
}

// Validation, moments, a-priori energy and an environment picture in one go.
int run_report(Options& o, Manifest& m, std::ostream& out)
{
    const CellConfiguration c = load_environment(o.com.env);
    const ValidationReport v = validate(c);
    const MomentReport mom = moment_stats(c, c.window());
    const Embedding e0 = phi0(c);
    const std::vector<std::pair<std::string, double>> rows = {
        {"cells", static_cast<double>(c.size())},
        {"edges", static_cast<double>(c.edges().size())},
        {"violations", static_cast<double>(v.violations.size())},
        {"mean_diam2_pi_over_area", mom.mean_diam2_pi_over_area},
        {"mean_diam2_pistar_over_area", mom.mean_diam2_pistar_over_area},
        {"max_diameter_over_side", mom.max_diameter_over_side},
        {"phi0_energy_per_area", dirichlet_energy(c, e0) / (c.window().side * c.window().side)},
    };
    CsvTable t;
    t.header = {"key", "value"};
    for (const auto& [k, val] : rows)
        t.rows.push_back({k, format_real(val)});
    write_csv(o.com.out, t);
    m.outputs = {o.com.out};
    if (!o.svg.empty()) {
        write_file_atomic(o.svg, render_svg(scene_from_environment(c)));
        m.outputs.push_back(o.svg);
    }
    out << "report: " << c.size() << " cells, " << v.violations.size() << " violations\n";
    write_manifest(o.com.out, m);
    return v.ok() ? 0 : 1;
}

} // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Random walks on planar cell configurations", "rwre_cli"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--threads", o.threads, "worker threads (default: RWRE_THREADS or hardware)");

    auto* gen = app.add_subcommand("gen", "generate an environment file");
    gen->add_option("--variant", o.spec.variant, "grid|split_grid|percolation|long_range|big_cell|two_scale")
        ->required();
    gen->add_option("--n", o.spec.n, "window side");
    gen->add_option("--law", o.law, "constant:c | uniform:a:b | two:a:b:p");
    gen->add_option("--seed", o.spec.seed, "random seed");
    gen->add_flag("--shift", o.spec.shift, "random lattice offset (grid)");
    gen->add_option("--anchor", o.anchor, "window corner x,y");
    gen->add_option("--k", o.spec.k, "split_grid level");
    gen->add_option("--p", o.spec.p, "percolation parameter");
    gen->add_option("--range", o.spec.range, "long_range N");
    gen->add_option("--big", o.spec.big, "big_cell side");
    gen->add_option("-o,--out", o.gen_out, "output environment file")->required();

    auto* val = app.add_subcommand("validate", "check an environment file");
    val->add_option("--env", o.com.env, "environment file")->required();
    val->add_option("-o,--out", o.com.out, "violations CSV");
    val->add_option("--lines", o.line_spacing, "spacing of lattice lines for the connectedness check");

    auto* emb = app.add_subcommand("embed", "phi0, phi_m or corrector embedding");
    add_env(emb, o.com);
    emb->add_option("--kind", o.embed_kind, "phi0|phi_m|corrector");
    emb->add_option("--mass", o.mass, "fractional mass m for phi_m");
    emb->add_option("--region-side", o.region_side, "side of the solve region (default half the window)");
    emb->add_option("--center", o.region_center, "region centre x,y");
    emb->add_option("--svg", o.svg, "SVG of the embedding");

    auto* en = app.add_subcommand("energy", "energy decomposition along a mass ladder");
    add_env(en, o.com);
    en->add_option("--m-first", o.m_first, "first mass");
    en->add_option("--m-max", o.m_max, "largest mass");
    en->add_option("--center", o.region_center, "point whose m_max square is the region");

    auto* wk = app.add_subcommand("walk", "simulate walk traces");
    add_env(wk, o.com);
    wk->add_option("--start", o.start, "start point x,y");
    wk->add_option("--horizon", o.horizon, "time horizon");
    wk->add_option("--steps", o.max_steps, "step cap");
    wk->add_option("--walks", o.walks, "number of walks");
    wk->add_option("--svg", o.svg, "SVG with trace overlay");

    auto* sg = app.add_subcommand("sigma", "quadratic variation constants");
    add_env(sg, o.com);
    sg->add_option("--walks", o.walks, "number of walks")->required();
    sg->add_option("--horizon", o.horizon, "time horizon T")->required();
    sg->add_option("--start-box", o.start_box, "side of the start box about the origin");
    sg->add_option("--embedding", o.embedding_file, "embedding file (default phi0)");

    auto* rc = app.add_subcommand("recurrence", "logarithmic test-function energies");
    add_env(rc, o.com);
    rc->add_option("--r-min", o.r_min, "smallest r");
    rc->add_option("--r-max", o.r_max, "largest r");

    auto* ex = app.add_subcommand("exit-law", "Prokhorov distance of walk and Brownian exit laws");
    add_env(ex, o.com);
    ex->add_option("--side", o.side, "side of the square S");
    ex->add_option("--center", o.region_center, "centre of S");
    ex->add_option("--samples", o.samples, "samples per law");
    ex->add_option("--sigma", o.sigma, "covariance s11,s12,s22");
    ex->add_option("--embedding", o.embedding_file, "embedding file (default phi0)");

    auto* tc = app.add_subcommand("transport-check", "mass transport balance z-score");
    add_env(tc, o.com);
    tc->add_option("--rule", o.rule, "identity|neighbor|disk|disk-broken");
    tc->add_option("--envs", o.n_envs, "placements");
    tc->add_option("--points", o.n_points, "Monte Carlo points per placement");
    tc->add_option("--radius", o.radius, "integration radius");
    tc->add_option("--margin", o.margin, "distance of placements from the window edge");
    tc->add_flag("!--no-normalize", o.normalize, "keep the base scale");

    auto* dc = app.add_subcommand("dcmp", "distance between two curve files");
    dc->add_option("--a", o.curve_a, "curve CSV (t,x,y)")->required();
    dc->add_option("--b", o.curve_b, "curve CSV (t,x,y)")->required();
    dc->add_option("--local", o.r_max_loc, "local variant up to this radius");
    dc->add_option("--quad", o.n_quad, "quadrature nodes for the local variant");
    dc->add_option("-o,--out", o.com.out, "output CSV")->required();

    auto* rp = app.add_subcommand("report", "summary bundle for an environment");
    add_env(rp, o.com);
    rp->add_option("--svg", o.svg, "SVG of the environment");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << sub->help();
        return 2;
    }

    o.com.threads = o.threads;
    CLI::App* sub = app.get_subcommands().front();
    Manifest m;
    m.command = sub->get_name();
    m.args = args;
    try {
        if (sub == gen)
            return run_gen(o, m, out);
        if (sub == val)
            return run_validate(o, m, out);
        if (sub == emb)
            return run_embed(o, m, out);
        if (sub == en)
            return run_energy(o, m, out);
        if (sub == wk)
            return run_walk_cmd(o, m, out);
        if (sub == sg)
            return run_sigma(o, m, out, err);
        if (sub == rc)
            return run_recurrence(o, m, out);
        if (sub == ex)
            return run_exit_law(o, m, out);
        if (sub == tc)
            return run_transport(o, m, out);
        if (sub == dc)
            return run_dcmp(o, m, out);
        if (sub == rp)
            return run_report(o, m, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n" << sub->help();
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

int cli_dispatch(int argc, const char* const* argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i)
        args.emplace_back(argv[i]);
    return cli_dispatch(args, std::cout, std::cerr);
}

} // namespace rwre
