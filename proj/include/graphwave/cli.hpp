#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace graphwave::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;  // parse, assumption, domain, feasibility, ball exit
inline constexpr int kExitSolver = 2;  // non-convergence, blow-up
inline constexpr int kExitUsage = 64;  // bad flags or arguments (sysexits EX_USAGE)

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kToolVersion = "0.1.0";

/// Runs one subcommand. JSON summary goes to `out`, diagnostics to `err`,
/// CSV artifacts and the run manifest to the --out directory when given.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload for tests.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a of a byte string; used to fingerprint graph configs.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace graphwave::cli
