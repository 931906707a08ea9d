// Command-line front end. run_cli is the whole program minus process
// plumbing, so tests can drive it in-process.

#ifndef RULEPARSE_TOOLS_CLI_H_
#define RULEPARSE_TOOLS_CLI_H_

#include <ostream>
#include <string_view>
#include <string>
#include <vector>

namespace ruleparse::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kInternalError = 3 };

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// 64-bit FNV-1a, lowercase hex.
std::string fnv1a64_hex(std::string_view bytes);

}  // namespace ruleparse::cli

#endif  // RULEPARSE_TOOLS_CLI_H_
