#ifndef QLBN_CLI_HPP_
#define QLBN_CLI_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qlbn/belief_explorer.hpp"

namespace qlbn::cli {

// Process exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kInvalid = 2;      // validation or parse failure
inline constexpr int kUnreachable = 3;  // unreachable target, degenerate math
inline constexpr int kIoFailure = 4;

// Runs one command line (without the program name). Everything the command
// prints goes to `out`; diagnostics go to `err`.
int run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err);

// Grid CSV: header "theta_a,theta_b,prob_<action>...,eu_<action>...,chosen,
// region", one row per node in row-major order.
std::string grid_csv(const BeliefGrid &grid);

// gnuplot script rendering the grid CSV found at `csv_path`, a path relative
// to the directory the script is written to.
std::string plot_script(const BeliefGrid &grid, const std::string &csv_path);

}  // namespace qlbn::cli

#endif  // QLBN_CLI_HPP_
