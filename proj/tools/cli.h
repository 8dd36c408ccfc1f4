#ifndef UNIPOS_TOOLS_CLI_H_
#define UNIPOS_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace unipos::cli {

inline constexpr const char *kVersion = "1.0.0";

// Exit codes: 0 success, 1 usage error, 2 data error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// `args` excludes the program name.
int Run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace unipos::cli

#endif  // UNIPOS_TOOLS_CLI_H_
