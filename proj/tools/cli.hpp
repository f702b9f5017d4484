#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lstarf::cli {

/// Exit statuses returned by dispatch.
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kUsage = 2;
inline constexpr int kRuntime = 3;

/// Runs one invocation. `args` excludes the program name. Everything the
/// user should see goes to `out` / `err`; result files go to the paths given
/// by flags, or under $LSTARF_OUT_DIR (default ".") when a path is omitted.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lstarf::cli
