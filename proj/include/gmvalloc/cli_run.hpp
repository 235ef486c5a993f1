#pragma once

#include <iosfwd>
#include <limits>
#include <string>

// Command dispatch for the gmvalloc tool, separated from argument parsing so
// tests can drive commands without spawning processes.
namespace gmv::cli {

struct RunSpec {
    std::string command;      // calibrate | allocate | leverage | bet | simulate | pipeline
    std::string input_path;   // JSON input file
    std::string output_path;  // empty = write to the out stream
    std::string format = "json";  // json | csv
    // Optional command-line overrides of the corresponding input fields.
    double lambda = std::numeric_limits<double>::quiet_NaN();
    double risk_aversion = std::numeric_limits<double>::quiet_NaN();
    double horizon = std::numeric_limits<double>::quiet_NaN();
    long long seed = -1;  // -1 = keep the input file's seed
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNoConvergence = 3;

// Returns one of the exit codes above; never throws.  Results go to the
// output path (atomically) or to `out`; diagnostics go to `err`.
int run(const RunSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace gmv::cli
