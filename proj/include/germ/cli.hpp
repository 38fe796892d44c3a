#pragma once

// Command-line front end. Exit status: 0 success, 2 when the mathematics
// reports a negative result (failed check, missing root, violated hypothesis),
// 1 for unusable input.

#include <ostream>
#include <string>
#include <vector>

#include "germ/error.hpp"

namespace germ {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitMath = 2;

/// Exit status for a library error.
int exit_code(Errc code);

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace germ
