#pragma once

#include <string>
#include <vector>

#include "nfield/numerics.hpp"

namespace nf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNoSolution = 3;
inline constexpr int kExitNotRegular = 4;
inline constexpr int kExitInvalidBracket = 5;

// Entry point behind the nfield binary.
int run(int argc, const char* const* argv);

// Fixed float formatting for CSV output: 12 significant digits, C locale.
std::string fmt_g12(double v);

// Spectrum summary as written by `nfield spectrum`.
struct Summary {
    std::vector<Interval> intervals;
    std::string verdict;
    double max_lambda = 0.0;
};

Summary parse_summary(const std::string& json_text);

} // namespace nf::cli
