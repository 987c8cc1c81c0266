#pragma once

// Executes one ExperimentSpec: builds the atom list (scatterers first,
// then bank atoms in declaration order), propagates through the schedule,
// and materializes every requested output. write_artifacts lays the
// results out as CSV files plus a run_metadata.json document.

#include <map>
#include <string>
#include <vector>

#include "cavityspec/scenarios.hpp"

namespace cavityspec {

struct SnapshotResult {
    double time = 0.0;
    Eigen::VectorXd density;  // |T(r_i)|^2 on the run grid
};

struct TraceResult {
    std::vector<double> times;
    std::vector<std::vector<double>> excitation;  // [scatterer][time]
};

struct ComparisonResult {
    ComparisonRequest request;
    SpectrumComparison metrics;
    bool passed = false;
};

struct BankDiagnostics {
    std::string label;
    double absorbed_energy = 0.0;    // sum omega_n |c_n|^2 over bank atoms at t_read
    double absorbed_fraction = 0.0;  // relative to the field energy at t_read
};

struct RunResult {
    ExperimentSpec spec;
    SpatialGrid grid;
    std::vector<SnapshotResult> snapshots;
    TraceResult trace;
    std::map<std::string, Spectrum> spectra;  // unit-area normalized
    std::vector<ComparisonResult> comparisons;
    std::vector<BankDiagnostics> banks;
    std::vector<DrawnGaussian> drawn_components;  // multi-Gaussian runs only
    double norm_drift_rate = 0.0;
    double energy_rel_drift = 0.0;
    double initial_energy = 0.0;  // <H> at t = 0
    double wall_seconds = 0.0;
    std::vector<std::string> warnings;
};

RunResult run_experiment(const ExperimentSpec& spec);

// Files written: energy_density_t<T>.csv per snapshot, atom_excitation.csv,
// spectrum_<name>.csv per spectrum, run_metadata.json.
void write_artifacts(const RunResult& result, const std::string& out_dir);

// Spectrum CSV codec used by the run artifacts and the compare command.
std::string spectrum_to_csv(const Spectrum& s);
Spectrum spectrum_from_csv(const std::string& text, const std::string& origin);

}  // namespace cavityspec
