#ifndef TEMPORA_CLI_HPP_
#define TEMPORA_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace tempora {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Runs one CLI invocation. `args` excludes the program name.
/// Returns 0 on success, 1 on usage errors, 2 on runtime errors.
int cli_dispatch(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace tempora

#endif // TEMPORA_CLI_HPP_
