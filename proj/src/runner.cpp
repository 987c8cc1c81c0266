#include "cavityspec/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cavityspec/observables.hpp"

namespace cavityspec {

using nlohmann::json;

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::vector<double> unique_sorted(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

double field_energy(const SingleExcitationState& state, const ModeBasis& basis) {
    double e = 0.0;
    for (int n = 0; n < basis.mode_count(); ++n)
        e += basis.frequency[n] * std::norm(state.mode_amp[n]);
    return e;
}

}  // namespace

RunResult run_experiment(const ExperimentSpec& spec) {
    const auto t_start = std::chrono::steady_clock::now();
    validate_experiment(spec);

    RunResult result;
    result.spec = spec;

    const ModeBasis basis = build_mode_basis(spec.cavity_length, spec.n_modes);
    result.grid = SpatialGrid::over_basis(basis, spec.integrator.grid_oversample);

    // Scatterers first, then each bank's atoms in declaration order.
    std::vector<AtomSpec> atoms = spec.scatterers;
    std::map<std::string, int> bank_first_index;
    for (const auto& bank : spec.banks) {
        bank_first_index[bank.label] = static_cast<int>(atoms.size());
        const auto bank_atoms = build_analyzer_bank(bank);
        atoms.insert(atoms.end(), bank_atoms.begin(), bank_atoms.end());
    }

    SingleExcitationState initial;
    if (const auto* g = std::get_if<GaussianPhotonSpec>(&spec.initial_state)) {
        initial = gaussian_photon_state(basis, *g, static_cast<int>(atoms.size()));
    } else {
        const auto& m = std::get<MultiGaussianSpec>(spec.initial_state);
        initial = random_multi_gaussian_state(basis, m.n_components, m.seed,
                                              m.k_center, m.bounds,
                                              static_cast<int>(atoms.size()));
        result.drawn_components =
            draw_multi_gaussian_params(m.n_components, m.seed, m.k_center, m.bounds);
    }

    {
        const CoupledHamiltonian h0 = assemble_hamiltonian(basis, atoms, 0.0);
        result.initial_energy = h0.expectation(initial);
    }

    // Full states wherever a spectrum, snapshot, or bank readout needs one.
    std::vector<double> sample_times{spec.t_end};
    for (const auto& s : spec.spectra) sample_times.push_back(s.time);
    for (double t : spec.snapshot_times) sample_times.push_back(t);
    for (const auto& bank : spec.banks) sample_times.push_back(bank.t_read);
    sample_times = unique_sorted(std::move(sample_times));

    EvolveOptions options;
    options.backend = spec.integrator.backend;
    options.max_step = spec.integrator.max_step;
    for (std::size_t j = 0; j < spec.scatterers.size(); ++j)
        options.traced_atoms.push_back(static_cast<int>(j));
    const int n_trace = static_cast<int>(std::floor(spec.t_end / spec.trace_dt + 1e-9));
    for (int i = 0; i <= n_trace; ++i)
        options.trace_times.push_back(std::min(i * spec.trace_dt, spec.t_end));

    const Schedule schedule = make_schedule(atoms, sample_times, 0.0, spec.t_end);
    Trajectory trajectory =
        evolve(initial, basis, atoms, schedule, spec.t_end, options);

    result.norm_drift_rate = trajectory.norm_drift_rate;
    result.energy_rel_drift = trajectory.energy_rel_drift;
    result.warnings = trajectory.warnings;
    result.trace.times = options.trace_times;
    result.trace.excitation = trajectory.traces;

    std::map<double, const SingleExcitationState*> state_at;
    for (std::size_t i = 0; i < sample_times.size(); ++i)
        state_at[sample_times[i]] = &trajectory.samples[i];

    for (double t : spec.snapshot_times) {
        SnapshotResult snap;
        snap.time = t;
        snap.density = energy_density_profile(*state_at.at(t), basis, result.grid);
        result.snapshots.push_back(std::move(snap));
    }

    for (const auto& request : spec.spectra) {
        const SingleExcitationState& state = *state_at.at(request.time);
        Spectrum s;
        if (request.bank) {
            const auto bank_it = std::find_if(
                spec.banks.begin(), spec.banks.end(),
                [&](const AnalyzerBank& b) { return b.label == *request.bank; });
            s = analyzer_spectrum(state, *bank_it, bank_first_index.at(*request.bank));
        } else {
            s = filtered_mode_spectrum(state, basis, *request.filter, result.grid);
            if (request.time == 0.0 &&
                request.filter->kind == SpatialFilter::Kind::Unit)
                s.provenance = SpectrumProvenance::InitialState;
        }
        s.label = request.name;
        result.spectra[request.name] = normalize_spectrum(std::move(s));
    }

    for (const auto& request : spec.comparisons) {
        ComparisonResult cmp;
        cmp.request = request;
        cmp.metrics = compare_spectra(result.spectra.at(request.spectrum_a),
                                      result.spectra.at(request.spectrum_b));
        cmp.passed = cmp.metrics.l1 <= request.tolerance;
        result.comparisons.push_back(cmp);
    }

    for (const auto& bank : spec.banks) {
        const SingleExcitationState& state = *state_at.at(bank.t_read);
        BankDiagnostics diag;
        diag.label = bank.label;
        const int first = bank_first_index.at(bank.label);
        const auto comb = bank.comb();
        for (int n = 0; n < bank.n_atoms; ++n)
            diag.absorbed_energy += comb[n] * std::norm(state.atom_amp[first + n]);
        const double e_field = field_energy(state, basis);
        diag.absorbed_fraction = e_field > 0.0 ? diag.absorbed_energy / e_field : 0.0;
        result.banks.push_back(diag);
    }

    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    return result;
}

// ---------------------------------------------------------------------------
// Artifacts

std::string spectrum_to_csv(const Spectrum& s) {
    std::ostringstream out;
    out << "# spectrum: " << s.label << "\n";
    out << "# provenance: " << to_string(s.provenance) << "\n";
    out << "# normalized: " << (s.normalized ? "true" : "false") << "\n";
    out << "# units: omega in natural frequency units, S in 1/omega\n";
    out << "omega,S\n";
    for (std::size_t i = 0; i < s.frequency.size(); ++i)
        out << format_double(s.frequency[i]) << "," << format_double(s.intensity[i])
            << "\n";
    return out.str();
}

Spectrum spectrum_from_csv(const std::string& text, const std::string& origin) {
    Spectrum s;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto mark = line.find("provenance:");
            if (mark != std::string::npos) {
                const std::string p = line.substr(mark + 11);
                if (p.find("analyzer") != std::string::npos)
                    s.provenance = SpectrumProvenance::Analyzer;
                else if (p.find("initial-state") != std::string::npos)
                    s.provenance = SpectrumProvenance::InitialState;
            }
            continue;
        }
        if (!header_seen) {  // column header row
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error(origin + ": malformed CSV row '" + line + "'");
        s.frequency.push_back(std::stod(line.substr(0, comma)));
        s.intensity.push_back(std::stod(line.substr(comma + 1)));
    }
    if (s.frequency.size() < 2)
        throw std::runtime_error(origin + ": no spectrum data rows");
    s.label = origin;
    return s;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string snapshot_filename(double t) {
    return "energy_density_t" + format_double(t) + ".csv";
}

}  // namespace

void write_artifacts(const RunResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    json manifest;
    manifest["snapshots"] = json::array();
    for (const auto& snap : result.snapshots) {
        std::ostringstream csv;
        csv << "# energy density |T(r)|^2 at t = " << format_double(snap.time)
            << " (scenario: " << result.spec.name << ")\n";
        csv << "# units: r in natural length units, u in energy/length\n";
        csv << "r,u\n";
        for (int i = 0; i < result.grid.count; ++i)
            csv << format_double(result.grid.point(i)) << ","
                << format_double(snap.density[i]) << "\n";
        const std::string name = snapshot_filename(snap.time);
        write_file(dir / name, csv.str());
        manifest["snapshots"].push_back({{"time", snap.time}, {"file", name}});
    }

    {
        std::ostringstream csv;
        csv << "# excited-state population per scatterer atom (scenario: "
            << result.spec.name << ")\n";
        csv << "t";
        for (std::size_t j = 0; j < result.trace.excitation.size(); ++j)
            csv << ",p_atom" << j;
        csv << "\n";
        for (std::size_t i = 0; i < result.trace.times.size(); ++i) {
            csv << format_double(result.trace.times[i]);
            for (const auto& row : result.trace.excitation)
                csv << "," << format_double(row[i]);
            csv << "\n";
        }
        write_file(dir / "atom_excitation.csv", csv.str());
        manifest["trace"] = "atom_excitation.csv";
    }

    manifest["spectra"] = json::object();
    for (const auto& [name, spectrum] : result.spectra) {
        const std::string filename = "spectrum_" + name + ".csv";
        write_file(dir / filename, spectrum_to_csv(spectrum));
        manifest["spectra"][name] = filename;
    }

    json meta;
    meta["spec"] = json::parse(render_experiment(result.spec));
    meta["artifacts"] = manifest;
    meta["comparisons"] = json::array();
    for (const auto& cmp : result.comparisons) {
        meta["comparisons"].push_back({{"name", cmp.request.name},
                                       {"a", cmp.request.spectrum_a},
                                       {"b", cmp.request.spectrum_b},
                                       {"tolerance", cmp.request.tolerance},
                                       {"l1", cmp.metrics.l1},
                                       {"linf", cmp.metrics.linf},
                                       {"peak_shift", cmp.metrics.peak_shift},
                                       {"passed", cmp.passed}});
    }
    json diag;
    diag["norm_drift_rate"] = result.norm_drift_rate;
    diag["energy_rel_drift"] = result.energy_rel_drift;
    diag["initial_energy"] = result.initial_energy;
    diag["wall_seconds"] = result.wall_seconds;
    diag["warnings"] = result.warnings;
    diag["banks"] = json::array();
    for (const auto& bank : result.banks)
        diag["banks"].push_back({{"label", bank.label},
                                 {"absorbed_energy", bank.absorbed_energy},
                                 {"absorbed_fraction", bank.absorbed_fraction}});
    if (!result.drawn_components.empty()) {
        diag["drawn_gaussians"] = json::array();
        for (const auto& g : result.drawn_components)
            diag["drawn_gaussians"].push_back({{"k_center", g.k_center},
                                               {"k_sigma", g.k_sigma},
                                               {"center_position",
                                                g.center_position}});
    }
    meta["diagnostics"] = diag;
    write_file(dir / "run_metadata.json", meta.dump(2) + "\n");
}

}  // namespace cavityspec
