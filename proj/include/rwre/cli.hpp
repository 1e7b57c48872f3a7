#ifndef RWRE_CLI_HPP
#define RWRE_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace rwre {

constexpr const char* kArtifactVersion = "1.0.0";

// args excludes the program name. Returns 0 on success, 1 when a check or
// validation fails (or an input cannot be processed), 2 on usage errors.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_dispatch(int argc, const char* const* argv);

} // namespace rwre

#endif
