#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ns1d {

inline constexpr int kSchemaVersion = 1;

/// Runs one subcommand (steady, evans, contour, spectrum, evolve, sweep,
/// check). `args` excludes the program name. Returns 0 on success, 1 when a
/// result is Inconclusive or a solve fails to converge, 2 on usage errors
/// (bad flags, malformed config or input files, inadmissible parameters).
///
/// Artifacts go to --out (relative paths resolved against --output-dir,
/// then NS1D_OUTPUT_DIR) or to `out`. The summary JSON goes to `out` when
/// the artifact went to a file and to `err` otherwise.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ns1d
