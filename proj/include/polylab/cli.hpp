#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polylab::cli {

// Front end behind the polylab binary. `args` excludes the program name.
// Writes results to --out (default "-" = `out`), diagnostics to `err`.
//
// Exit codes:
//   0  success (for `experiment`: every verdict green)
//   1  experiment ran but a verdict failed; the report is still written
//   2  usage error: unknown subcommand/flag, malformed value, unsupported name
//   3  refused: projected time over --budget-seconds, infeasible size, or a
//      numeric routine failed to converge
//
// Single computations are guarded like experiments: work is projected from
// the requested sizes first and refused when it exceeds --budget-seconds.
// The worker count honors POLYLAB_THREADS. Nothing is written anywhere
// except --out and the two streams.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace polylab::cli
