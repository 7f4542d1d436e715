#pragma once

#include <ostream>

namespace interact::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // error diagnostics or replay divergence
inline constexpr int kExitUsage = 2;    // bad arguments or unreadable input

/// Runs one subcommand: validate, fmt, graph, run, replay or serve.
/// Payloads go to `out`; diagnostics, usage and logs go to `err`.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace interact::cli
