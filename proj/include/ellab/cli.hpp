#ifndef ELLAB_CLI_HPP
#define ELLAB_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace ellab {

// Runs one CLI invocation; args excludes the program name.
// Exit codes: 0 success, 1 checker failure / solver divergence, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Numeric CLI arguments may be expressions of the named constants
// pS(n), pstar(n), kappa(n), theta(K) with +, -, *, / and parentheses.
double parse_cli_number(const std::string& text);

}  // namespace ellab

#endif
