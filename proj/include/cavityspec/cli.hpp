#pragma once

// Command implementations behind the cavityspec binary. Kept separate
// from argv parsing so tests can drive them directly.

#include <optional>
#include <string>
#include <vector>

#include <cstdint>

namespace cavityspec::cli {

struct RunArgs {
    std::string config_path;  // one of config_path / scenario
    std::string scenario;
    std::string out_dir = "cavityspec_out";
    std::optional<std::uint64_t> seed;   // overrides a multi-Gaussian seed
    std::optional<double> dt_max;        // overrides integrator.max_step
    std::optional<std::string> backend;  // "eigendecomposition" | "rk4"
};

// Runs the experiment and writes all artifacts; returns the process exit
// code (0 on a completed run, 1 on validation/integration/spectrum
// failure). The CAVITYSPEC_OUT environment variable, when set, overrides
// the output directory.
int cmd_run(const RunArgs& args);

struct CompareArgs {
    std::string file_a;  // two spectrum CSVs ...
    std::string file_b;
    std::string run_dir;             // ... or every comparison of a run
    std::optional<double> tolerance; // default 0.05 (or the pair's own)
};

// Exit 0 iff every requested comparison has L1 <= tolerance.
int cmd_compare(const CompareArgs& args);

struct PlotArgs {
    std::string run_dir;
    std::string out_dir;  // defaults to run_dir
};

// Emits gnuplot scripts referencing the run's CSV artifacts.
int cmd_plot(const PlotArgs& args);

}  // namespace cavityspec::cli
