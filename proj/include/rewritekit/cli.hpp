#ifndef REWRITEKIT_CLI_HPP
#define REWRITEKIT_CLI_HPP

#include <iostream>
#include <string>
#include <vector>

namespace rewritekit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the rewritekit binary. Reports go to `out` unless a file
/// is named; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr);

/// Same, with the program name omitted from `args`.
int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace rewritekit

#endif  // REWRITEKIT_CLI_HPP
