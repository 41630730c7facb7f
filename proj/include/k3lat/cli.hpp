#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace k3lat::cli {

// Parses one command line (without the program name), runs the selected
// job, and writes a single JSON report line to `out`; human diagnostics go
// to `err`.  Returns the process exit code:
//   0  success (every verification flag in the report is true)
//   2  the command line or an operand could not be parsed
//   3  an operand violated a library precondition
//   4  an internal invariant or a report verification failed
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace k3lat::cli
