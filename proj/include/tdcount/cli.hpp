#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tdcount::cli {

//! Exit codes besides 0 (success) and the decision codes of `solve`.
inline constexpr int exit_usage       = 1; //!< parse or usage error
inline constexpr int exit_unsupported = 2; //!< UnsupportedRule or TooLarge
inline constexpr int exit_oracle      = 3; //!< --oracle-check found a mismatch
inline constexpr int exit_consistent   = 10;
inline constexpr int exit_inconsistent = 20;

//! Runs one command line (without the program name); `in` backs the `-` input.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace tdcount::cli
