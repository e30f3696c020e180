#pragma once

// Command-line front end: subcommands exact, semiclassical, oracle and sweep.
// Each run writes <name>.csv and <name>.manifest.json into the output
// directory (--out-dir, else $SUPERRAD_OUTPUT_DIR, else [output] dir, else ".").

#include <map>
#include <ostream>
#include <set>
#include <string>

namespace superrad::cli {

inline constexpr int kCsvSchemaVersion = 1;

/// First line of every CSV: "# superrad schema=<version> kind=<kind>".
std::string schema_line(const std::string& kind);

/// %.16e; NaN and infinities as nan, inf, -inf.
std::string format_number(double value);

/// Sections and keys accepted in configuration files.
const std::map<std::string, std::set<std::string>>& config_schema();

/// Returns the process exit code: 0 success, 1 solver or output failure,
/// 2 usage, configuration or parameter error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace superrad::cli
