#include "rwre/io.hpp"
#include "rwre/analysis.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace rwre {

namespace {

using json = nlohmann::ordered_json;

void put_point(std::string& out, const Point& p)
{
    out += '[';
    out += format_real(p.x());
    out += ',';
    out += format_real(p.y());
    out += ']';
}

void put_string(std::string& out, const std::string& s)
{
    out += json(s).dump();
}

void put_ring(std::string& out, std::size_t comp, bool hole, const Ring& ring)
{
    out += "{\"component\":" + std::to_string(comp) + ",\"hole\":" + (hole ? "true" : "false") + ",\"points\":[";
    for (std::size_t i = 0; i < ring.size(); ++i) {
        if (i)
            out += ',';
        put_point(out, ring[i]);
    }
    out += "]}";
}

double get_real(const json& j, const char* key)
{
    if (!j.contains(key) || !j.at(key).is_number())
        throw FormatError(std::string("missing number '") + key + "'");
    return j.at(key).get<double>();
}

Point get_point(const json& j)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw FormatError("point must be [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json parse(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed document: ") + e.what());
    }
}

} // namespace

std::string environment_to_json(const CellConfiguration& c)
{
    std::string out = "{\"version\":" + std::to_string(kEnvironmentVersion) + ",\n\"window\":{\"anchor_x\":" +
                      format_real(c.window().anchor.x()) + ",\"anchor_y\":" + format_real(c.window().anchor.y()) +
                      ",\"side\":" + format_real(c.window().side) + "},\n\"bounded\":" +
                      (c.bounded() ? "true" : "false") + ",\n\"cells\":[\n";
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i)
            out += ",\n";
        out += "{\"id\":" + std::to_string(c.id(i)) + ",\"rings\":[";
        const Region& r = c.region(i);
        bool first = true;
        for (std::size_t k = 0; k < r.components.size(); ++k) {
            if (!first)
                out += ',';
            first = false;
            put_ring(out, k, false, r.components[k].outer);
            for (const Ring& h : r.components[k].holes) {
                out += ',';
                put_ring(out, k, true, h);
            }
        }
        out += "]}";
    }
    out += "],\n\"edges\":[\n";
    for (std::size_t k = 0; k < c.edges().size(); ++k) {
        const Edge& e = c.edges()[k];
        if (k)
            out += ",\n";
        out += "{\"a\":" + std::to_string(c.id(e.a)) + ",\"b\":" + std::to_string(c.id(e.b)) +
               ",\"conductance\":" + format_real(e.conductance) + "}";
    }
    out += "]";
    if (c.lattice()) {
        const LatticeData& l = *c.lattice();
        out += ",\n\"lattice\":{\"vertices\":[";
        for (std::size_t k = 0; k < l.vertices.size(); ++k) {
            if (k)
                out += ',';
            put_point(out, l.vertices[k]);
        }
        out += "],\n\"edges\":[";
        for (std::size_t k = 0; k < l.edges.size(); ++k) {
            if (k)
                out += ',';
            out += "[" + std::to_string(l.edges[k].a) + "," + std::to_string(l.edges[k].b) + "," +
                   format_real(l.edges[k].conductance) + "]";
        }
        out += "],\n\"faces\":[";
        for (std::size_t k = 0; k < l.face_vertices.size(); ++k) {
            if (k)
                out += ',';
            out += '[';
            for (std::size_t m = 0; m < l.face_vertices[k].size(); ++m) {
                if (m)
                    out += ',';
                out += std::to_string(l.face_vertices[k][m]);
            }
            out += ']';
        }
        out += "]}";
    }
    const GeneratorMeta& m = c.meta();
    out += ",\n\"meta\":{\"generator\":";
    put_string(out, m.generator);
    out += ",\"seed\":" + std::to_string(m.seed) + ",\"parameters\":{";
    for (std::size_t k = 0; k < m.params.size(); ++k) {
        if (k)
            out += ',';
        put_string(out, m.params[k].first);
        out += ':';
        put_string(out, m.params[k].second);
    }
    out += "}}}\n";
    return out;
}

CellConfiguration environment_from_json(const std::string& text)
{
    const json doc = parse(text);
    if (!doc.is_object() || !doc.contains("version") || !doc.at("version").is_number_integer())
        throw FormatError("missing version");
    if (doc.at("version").get<int>() != kEnvironmentVersion)
        throw FormatError("unsupported version " + std::to_string(doc.at("version").get<int>()));
    if (!doc.contains("window") || !doc.contains("cells") || !doc.contains("edges"))
        throw FormatError("missing window, cells or edges");
    const json& w = doc.at("window");
    const Square window{Point(get_real(w, "anchor_x"), get_real(w, "anchor_y")), get_real(w, "side")};

    std::vector<Region> regions;
    std::vector<std::int64_t> ids;
    std::map<std::int64_t, std::size_t> index;
    for (const json& cell : doc.at("cells")) {
        if (!cell.contains("id") || !cell.at("id").is_number_integer() || !cell.contains("rings"))
            throw FormatError("cell needs integer id and rings");
        const auto id = cell.at("id").get<std::int64_t>();
        Region r;
        for (const json& ring : cell.at("rings")) {
            const std::size_t comp = ring.at("component").get<std::size_t>();
            Ring pts;
            for (const json& p : ring.at("points"))
                pts.push_back(get_point(p));
            if (comp > r.components.size())
                throw FormatError("ring components out of order in cell " + std::to_string(id));
            const bool hole = ring.value("hole", false);
            if (comp == r.components.size()) {
                if (hole)
                    throw FormatError("hole before its outer ring in cell " + std::to_string(id));
                r.components.push_back({std::move(pts), {}});
            } else if (hole) {
                r.components[comp].holes.push_back(std::move(pts));
            } else {
                throw FormatError("second outer ring for one component in cell " + std::to_string(id));
            }
        }
        if (!index.emplace(id, regions.size()).second)
            throw FormatError("duplicate cell id " + std::to_string(id));
        ids.push_back(id);
        regions.push_back(std::move(r));
    }
    std::vector<Edge> edges;
    for (const json& e : doc.at("edges")) {
        const auto a = index.find(e.at("a").get<std::int64_t>());
        const auto b = index.find(e.at("b").get<std::int64_t>());
        if (a == index.end() || b == index.end())
            throw FormatError("edge refers to an unknown cell");
        edges.push_back({a->second, b->second, get_real(e, "conductance")});
    }
    ConfigOptions opts;
    opts.bounded = doc.value("bounded", false);
    opts.check_simple = false;
    CellConfiguration c(std::move(regions), std::move(edges), window, opts, std::move(ids));

    if (doc.contains("lattice")) {
        const json& l = doc.at("lattice");
        LatticeData ld;
        for (const json& p : l.at("vertices"))
            ld.vertices.push_back(get_point(p));
        for (const json& e : l.at("edges"))
            ld.edges.push_back({e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>(), e.at(2).get<double>()});
        for (const json& f : l.at("faces"))
            ld.face_vertices.push_back(f.get<std::vector<std::size_t>>());
        c.set_lattice(std::move(ld));
    }
    if (doc.contains("meta")) {
        const json& m = doc.at("meta");
        GeneratorMeta meta;
        meta.generator = m.value("generator", std::string("custom"));
        meta.seed = m.value("seed", std::uint64_t{0});
        if (m.contains("parameters"))
            for (auto it = m.at("parameters").begin(); it != m.at("parameters").end(); ++it)
                meta.params.emplace_back(it.key(), it.value().is_string() ? it.value().get<std::string>()
                                                                          : it.value().dump());
        c.set_meta(std::move(meta));
    }
    return c;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void save_environment(const std::string& path, const CellConfiguration& c)
{
    write_file_atomic(path, environment_to_json(c));
}

CellConfiguration load_environment(const std::string& path)
{
    return environment_from_json(read_file(path));
}

std::string embedding_to_json(const CellConfiguration& c, const Embedding& e)
{
    if (e.size() != c.size())
        throw FormatError("embedding does not match configuration");
    std::string out = "{\"label\":";
    put_string(out, e.label);
    out += ",\"residual\":" + format_real(e.residual) + ",\n\"cells\":[\n";
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i)
            out += ",\n";
        out += "{\"id\":" + std::to_string(c.id(i)) + ",\"x\":" + format_real(e[i].x()) +
               ",\"y\":" + format_real(e[i].y()) + "}";
    }
    out += "]}\n";
    return out;
}

Embedding embedding_from_json(const CellConfiguration& c, const std::string& text)
{
    const json doc = parse(text);
    Embedding e;
    e.label = doc.value("label", std::string("custom"));
    e.residual = doc.value("residual", 0.0);
    e.values.assign(c.size(), Point(NAN, NAN));
    std::vector<char> seen(c.size(), 0);
    for (const json& cell : doc.at("cells")) {
        const auto idx = c.index_of(cell.at("id").get<std::int64_t>());
        if (!idx)
            throw FormatError("embedding refers to an unknown cell");
        e.values[*idx] = Point(get_real(cell, "x"), get_real(cell, "y"));
        seen[*idx] = 1;
    }
    for (char s : seen)
        if (!s)
            throw FormatError("embedding misses a cell");
    return e;
}

std::string trace_to_csv(const CellConfiguration& c, const WalkTrace& t)
{
    CsvTable tab;
    tab.header = {"jump", "cell_id", "time"};
    for (std::size_t j = 0; j < t.cells.size(); ++j)
        tab.rows.push_back({std::to_string(j), std::to_string(c.id(t.cells[j])), format_real(t.jump_times[j])});
    if (!t.cells.empty())
        tab.rows.push_back({"end", std::to_string(c.id(t.cells.back())), format_real(t.end_time)});
    return tab.str();
}

std::string curve_to_csv(const TimedCurve& cv)
{
    CsvTable tab;
    tab.header = {"t", "x", "y"};
    for (std::size_t i = 0; i < cv.size(); ++i)
        tab.add_row({cv.times[i], cv.points[i].x(), cv.points[i].y()});
    return tab.str();
}

TimedCurve curve_from_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw FormatError("empty curve file");
    std::vector<double> times;
    std::vector<Point> pts;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        double t = 0, x = 0, y = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ls(line);
        if (!(ls >> t >> c1 >> x >> c2 >> y) || c1 != ',' || c2 != ',')
            throw FormatError("bad curve row at line " + std::to_string(lineno));
        times.push_back(t);
        pts.emplace_back(x, y);
    }
    try {
        return make_curve(std::move(times), std::move(pts));
    } catch (const GeometryError& e) {
        throw FormatError(e.what());
    }
}

} // namespace rwre
