#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace equipart::cli {

// Exit codes.
inline constexpr int kOk = 0;            // certified / success
inline constexpr int kInconclusive = 1;  // inconclusive / no success
inline constexpr int kUsageError = 2;    // usage or configuration error
inline constexpr int kInternalError = 3; // internal consistency failure

// Runs one invocation.  args excludes the program name.  Documents go to
// `out`; failures print a single-line JSON error to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace equipart::cli
