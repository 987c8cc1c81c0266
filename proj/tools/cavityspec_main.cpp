// cavityspec: single-excitation light in a 1D cavity, with local spectra
// measured two ways (analyzer-atom combs and filtered correlation
// functions). See README.md for the scenario catalogue and file formats.

#include <CLI11.hpp>

#include "cavityspec/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"1D cavity QED spectrum simulator"};
    app.require_subcommand(1);

    cavityspec::cli::RunArgs run_args;
    auto* run = app.add_subcommand("run", "run an experiment and write artifacts");
    run->add_option("--config", run_args.config_path,
                    "experiment config JSON (see docs/config_schema.md)");
    run->add_option("--scenario", run_args.scenario,
                    "built-in scenario: one_atom, three_atoms, random_photon");
    run->add_option("--out", run_args.out_dir, "output directory")
        ->capture_default_str();
    std::uint64_t seed = 0;
    auto* seed_opt = run->add_option("--seed", seed, "override the random-photon seed");
    double dt_max = 0.0;
    auto* dt_opt = run->add_option("--dt-max", dt_max, "RK4 step bound");
    std::string backend;
    run->add_option("--backend", backend, "eigendecomposition (default) or rk4");

    cavityspec::cli::CompareArgs cmp_args;
    auto* cmp = app.add_subcommand(
        "compare", "compare two spectrum CSVs, or all pairs of a run");
    cmp->add_option("a", cmp_args.file_a, "first spectrum CSV");
    cmp->add_option("b", cmp_args.file_b, "second spectrum CSV");
    cmp->add_option("--run", cmp_args.run_dir, "run directory with metadata");
    double tol = 0.0;
    auto* tol_opt = cmp->add_option("--tol", tol, "L1 pass threshold");

    cavityspec::cli::PlotArgs plot_args;
    auto* plot = app.add_subcommand("plot", "emit gnuplot scripts for a run");
    plot->add_option("run_dir", plot_args.run_dir, "run directory")->required();
    plot->add_option("--out", plot_args.out_dir, "script output directory");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        if (*seed_opt) run_args.seed = seed;
        if (*dt_opt) run_args.dt_max = dt_max;
        if (!backend.empty()) run_args.backend = backend;
        return cavityspec::cli::cmd_run(run_args);
    }
    if (cmp->parsed()) {
        if (*tol_opt) cmp_args.tolerance = tol;
        return cavityspec::cli::cmd_compare(cmp_args);
    }
    return cavityspec::cli::cmd_plot(plot_args);
}
