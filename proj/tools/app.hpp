#pragma once

// The contactkit command line: verify / product / period / prequant.
// Exit codes: 0 all checks pass, 1 a check failed, 2 input error.

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "contactkit/check.hpp"

namespace contactkit::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitInputError = 2;

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

struct ReportHeader {
    std::string command;
    std::string target;
    std::string digest;
    std::uint64_t seed = 0;
};

/// One JSON object per check, keys sorted, checks in the given order.
std::string ndjson_report(const ReportHeader& h, const std::vector<Check>& checks);

/// argv-style entry point; writes the human-readable table to `out` and
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace contactkit::cli
