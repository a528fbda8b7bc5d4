#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mpg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitSolver = 3;

/// Runs one mpgsolve command. `args` excludes the program name. Results go to `out` (or the
/// --out file), one JSON diagnostic line per failure goes to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mpg::cli
