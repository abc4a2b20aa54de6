#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace contour::gateway {

/// Subcommands: import-svg, rasterize, stats, consensus, eval, toy-train,
/// game-field, classify, serve. `args` excludes the program name. Returns
/// the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace contour::gateway
