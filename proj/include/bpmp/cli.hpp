#pragma once

// Command-line front end. Exit codes: 0 success, 1 infeasible instance or
// failed validation, 2 usage error, 3 external backend failure.

#include <ostream>
#include <string>
#include <vector>

namespace bpmp {

// `args` excludes the program name. Reports go to `out` unless -o names
// a file; diagnostics always go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bpmp
