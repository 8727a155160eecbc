#pragma once

#include <iosfwd>
#include <string>

namespace rankrec::cli {

inline constexpr int kExitOk = 0;
/// A property, certificate gate or solver post-condition failed; the report
/// is still written.
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one command line. Documents go to --out (written atomically) or to
/// `out`; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Drops the timestamp header line ("# generated ..." in CSV, the
/// "generated" member in JSON) so artifacts of identical runs compare equal.
std::string strip_timestamp(const std::string& artifact);

}  // namespace rankrec::cli
