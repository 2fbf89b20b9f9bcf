#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace critsys::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitUsage = 64;

/// Runs one `critsys` command. `args` excludes the program name.
/// Results go to `out` (or the --out path), structured errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// %.17g, with "nan", "inf" and "-inf" for non-finite values.
std::string format17(double v);

} // namespace critsys::cli
