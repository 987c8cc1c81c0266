#include "cavityspec/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "cavityspec/runner.hpp"

namespace cavityspec::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string resolve_out_dir(const std::string& requested) {
    if (const char* env = std::getenv("CAVITYSPEC_OUT"); env && *env) return env;
    return requested;
}

}  // namespace

int cmd_run(const RunArgs& args) {
    try {
        if (args.config_path.empty() == args.scenario.empty()) {
            std::cerr << "run: give exactly one of --config or --scenario\n";
            return 1;
        }
        ExperimentSpec spec;
        if (!args.scenario.empty()) {
            auto builtin = builtin_scenario(args.scenario);
            if (!builtin) {
                std::cerr << "run: unknown scenario '" << args.scenario
                          << "'; built-ins:";
                for (const auto& name : builtin_scenario_names())
                    std::cerr << " " << name;
                std::cerr << "\n";
                return 1;
            }
            spec = std::move(*builtin);
        } else {
            spec = parse_experiment(read_file(args.config_path));
        }

        if (args.seed) {
            if (auto* m = std::get_if<MultiGaussianSpec>(&spec.initial_state))
                m->seed = *args.seed;
            else
                std::cerr << "run: --seed ignored, initial state is deterministic\n";
        }
        if (args.dt_max) spec.integrator.max_step = *args.dt_max;
        if (args.backend) {
            if (*args.backend == "eigendecomposition")
                spec.integrator.backend = PropagatorBackend::Eigendecomposition;
            else if (*args.backend == "rk4")
                spec.integrator.backend = PropagatorBackend::RungeKutta4;
            else {
                std::cerr << "run: unknown backend '" << *args.backend << "'\n";
                return 1;
            }
        }

        const std::string out_dir = resolve_out_dir(args.out_dir);
        const RunResult result = run_experiment(spec);
        write_artifacts(result, out_dir);

        std::cout << "scenario " << spec.name << ": t_end=" << spec.t_end
                  << ", dim=" << spec.n_modes << " modes";
        std::cout << ", norm drift " << result.norm_drift_rate
                  << "/t, energy drift " << result.energy_rel_drift << "\n";
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
        for (const auto& cmp : result.comparisons) {
            std::printf("comparison %-14s L1=%.4f  Linf=%.4f  peak_shift=%.3f  [%s]\n",
                        cmp.request.name.c_str(), cmp.metrics.l1, cmp.metrics.linf,
                        cmp.metrics.peak_shift,
                        cmp.passed ? "within tol" : "exceeds tol");
        }
        std::cout << "artifacts written to " << out_dir << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "run: " << e.what() << "\n";
        return 1;
    }
}

namespace {

int compare_pair(const Spectrum& a, const Spectrum& b, const std::string& name,
                 double tol) {
    const SpectrumComparison cmp =
        compare_spectra(normalize_spectrum(a), normalize_spectrum(b));
    const bool ok = cmp.l1 <= tol;
    std::printf("%-18s L1=%.6f  Linf=%.6f  peak_shift=%.4f  tol=%.3g  [%s]\n",
                name.c_str(), cmp.l1, cmp.linf, cmp.peak_shift, tol,
                ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}

}  // namespace

int cmd_compare(const CompareArgs& args) {
    try {
        if (!args.run_dir.empty()) {
            const fs::path dir(args.run_dir);
            const json meta = json::parse(read_file(dir / "run_metadata.json"));
            int status = 0;
            if (meta["comparisons"].empty()) {
                std::cerr << "compare: run has no comparison pairs\n";
                return 1;
            }
            for (const auto& c : meta["comparisons"]) {
                const std::string name_a = c["a"], name_b = c["b"];
                const std::string file_a = meta["artifacts"]["spectra"][name_a];
                const std::string file_b = meta["artifacts"]["spectra"][name_b];
                const double tol =
                    args.tolerance.value_or(c["tolerance"].get<double>());
                const auto sa = spectrum_from_csv(read_file(dir / file_a), name_a);
                const auto sb = spectrum_from_csv(read_file(dir / file_b), name_b);
                status |= compare_pair(sa, sb, c["name"], tol);
            }
            return status;
        }
        if (args.file_a.empty() || args.file_b.empty()) {
            std::cerr << "compare: give two spectrum CSVs or --run <dir>\n";
            return 1;
        }
        const auto a = spectrum_from_csv(read_file(args.file_a), args.file_a);
        const auto b = spectrum_from_csv(read_file(args.file_b), args.file_b);
        return compare_pair(a, b, "spectra", args.tolerance.value_or(0.05));
    } catch (const std::exception& e) {
        std::cerr << "compare: " << e.what() << "\n";
        return 1;
    }
}

namespace {

void write_script(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string gp_header(const std::string& title) {
    std::ostringstream s;
    s << "# gnuplot script (run: gnuplot -p <this file>)\n";
    s << "set datafile separator ','\n";
    s << "set key autotitle columnhead\n";
    s << "set title \"" << title << "\"\n";
    return s.str();
}

}  // namespace

int cmd_plot(const PlotArgs& args) {
    try {
        const fs::path run_dir(args.run_dir);
        const fs::path out_dir(args.out_dir.empty() ? args.run_dir : args.out_dir);
        const fs::path meta_path = run_dir / "run_metadata.json";
        if (!fs::exists(meta_path)) {
            std::cerr << "plot: no run_metadata.json in " << run_dir << "\n";
            return 1;
        }
        fs::create_directories(out_dir);
        const json meta = json::parse(read_file(meta_path));
        const std::string scenario = meta["spec"]["name"];
        int scripts = 0;

        {
            std::ostringstream s;
            s << gp_header("energy density, scenario " + scenario);
            s << "set xlabel 'r'\nset ylabel '|T(r)|^2'\n";
            s << "plot ";
            bool first = true;
            for (const auto& snap : meta["artifacts"]["snapshots"]) {
                const std::string file = snap["file"];
                if (!fs::exists(run_dir / file))
                    throw std::runtime_error("missing artifact " + file);
                if (!first) s << ", \\\n     ";
                s << "'" << file << "' using 1:2 with lines title 't="
                  << snap["time"].dump() << "'";
                first = false;
            }
            s << "\n";
            if (first) throw std::runtime_error("run has no energy density snapshots");
            write_script(out_dir / "plot_energy_density.gp", s.str());
            ++scripts;
        }

        {
            const std::string trace_file = meta["artifacts"]["trace"];
            if (!fs::exists(run_dir / trace_file))
                throw std::runtime_error("missing artifact " + trace_file);
            std::ostringstream s;
            s << gp_header("scatterer excitation, scenario " + scenario);
            s << "set xlabel 't'\nset ylabel 'excited-state population'\n";
            s << "plot for [col=2:*] '" << trace_file
              << "' using 1:col with lines\n";
            write_script(out_dir / "plot_excitation.gp", s.str());
            ++scripts;
        }

        for (const auto& c : meta["comparisons"]) {
            const std::string name = c["name"];
            const std::string file_a =
                meta["artifacts"]["spectra"][c["a"].get<std::string>()];
            const std::string file_b =
                meta["artifacts"]["spectra"][c["b"].get<std::string>()];
            for (const auto& f : {file_a, file_b})
                if (!fs::exists(run_dir / f))
                    throw std::runtime_error("missing artifact " + f);
            std::ostringstream s;
            s << gp_header("spectra '" + name + "', scenario " + scenario);
            s << "set xlabel 'omega'\nset ylabel 'S(omega)'\n";
            s << "plot '" << file_a << "' using 1:2 with lines title '"
              << c["a"].get<std::string>() << "', \\\n     '" << file_b
              << "' using 1:2 with lines title '" << c["b"].get<std::string>()
              << "'\n";
            write_script(out_dir / ("plot_spectra_" + name + ".gp"), s.str());
            ++scripts;
        }

        std::cout << "wrote " << scripts << " plot scripts to " << out_dir << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "plot: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace cavityspec::cli
