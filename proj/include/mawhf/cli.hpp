#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mawhf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNonConvergence = 3;

struct RunConfig {
    std::string subcommand;
    std::string model_path;
    double s = 1.0;
    std::optional<std::size_t> grid_n;
    std::optional<double> x_span;
    /// Empty: write to stdout.
    std::string out_dir;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    std::size_t n = 100000;
    std::vector<double> levels;
    std::vector<double> x;
    std::size_t csv_stride = 16;
    bool csv = false;
    bool deterministic = false;
};

/// Executes one subcommand. Reports go to out (or files under out_dir),
/// diagnostics to err. Returns one of the exit codes above.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Default for --workers: MAWHF_WORKERS when set and valid, else 0.
unsigned default_workers();

}  // namespace mawhf::cli
