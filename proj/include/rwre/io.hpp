#ifndef RWRE_IO_HPP
#define RWRE_IO_HPP

#include "rwre/environment.hpp"
#include "rwre/harmonic.hpp"
#include "rwre/walk.hpp"

#include <string>

namespace rwre {

class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

constexpr int kEnvironmentVersion = 1;

// JSON document; reals at 17 significant digits, edges refer to cell ids.
std::string environment_to_json(const CellConfiguration& c);
CellConfiguration environment_from_json(const std::string& text);
void save_environment(const std::string& path, const CellConfiguration& c);
CellConfiguration load_environment(const std::string& path);

// {label, residual, cells: [{id, x, y}]}
std::string embedding_to_json(const CellConfiguration& c, const Embedding& e);
Embedding embedding_from_json(const CellConfiguration& c, const std::string& text);

// CSV with header "jump,cell_id,time"; the last row repeats the final cell at end_time.
std::string trace_to_csv(const CellConfiguration& c, const WalkTrace& t);

// CSV with header "t,x,y".
std::string curve_to_csv(const TimedCurve& cv);
TimedCurve curve_from_csv(const std::string& text);

std::string read_file(const std::string& path);

} // namespace rwre

#endif
