#pragma once

// Declarative experiment descriptions: cavity, initial state, scatterer
// atoms, analyzer banks, and requested outputs. Built-in scenarios
// reproduce the three reference experiments (one atom, three atoms,
// random ten-Gaussian photon); user experiments come from a JSON document
// with the same shape (see docs/config_schema.md).

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cavityspec/core.hpp"
#include "cavityspec/dynamics.hpp"
#include "cavityspec/spectra.hpp"

namespace cavityspec {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MultiGaussianSpec {
    int n_components = 1;
    std::uint64_t seed = 0;
    double k_center = 0.0;
    MultiGaussianBounds bounds;
};

using InitialStateSpec = std::variant<GaussianPhotonSpec, MultiGaussianSpec>;

// One requested spectrum: either a bank readout or a filtered-correlation
// mode reconstruction, evaluated at `time`.
struct SpectrumRequest {
    std::string name;
    std::optional<std::string> bank;
    std::optional<SpatialFilter> filter;
    double time = 0.0;
};

struct ComparisonRequest {
    std::string name;
    std::string spectrum_a;
    std::string spectrum_b;
    double tolerance = 0.05;
};

struct IntegratorSpec {
    PropagatorBackend backend = PropagatorBackend::Eigendecomposition;
    double max_step = 0.0;    // RK4 only; 0 = automatic
    int grid_oversample = 8;  // spatial grid intervals per retained mode
};

struct ExperimentSpec {
    std::string name;
    double cavity_length = 0.0;
    int n_modes = 0;
    InitialStateSpec initial_state;
    std::vector<AtomSpec> scatterers;
    std::vector<AnalyzerBank> banks;
    std::vector<double> snapshot_times;
    double trace_dt = 0.01;  // excitation sampling step for all scatterers
    std::vector<SpectrumRequest> spectra;
    std::vector<ComparisonRequest> comparisons;
    double t_end = 0.0;
    IntegratorSpec integrator;
};

// Scatterer helper: dipole filled in from the decay constant.
AtomSpec make_scatterer(double position, double frequency, double decay_rate,
                        std::vector<ActivationWindow> schedule = {always_on()});

// Throws ValidationError naming the offending field.
void validate_experiment(const ExperimentSpec& spec);

// Gaussian photon split by one resonant atom at the cavity center;
// spectra of the reflected and the two transmitted peaks.
ExperimentSpec scenario_one_atom();

// Three co-located scatterers (90, 100, 110) carving/reflecting three
// lines out of a broad photon; longer cavity, 1600 modes.
ExperimentSpec scenario_three_atoms();

// Superposition of ten seeded random Gaussians against one resonant atom.
inline constexpr std::uint64_t kDefaultRandomSeed = 21;
ExperimentSpec scenario_random_photon(std::uint64_t seed = kDefaultRandomSeed);

std::vector<std::string> builtin_scenario_names();
std::optional<ExperimentSpec> builtin_scenario(const std::string& name);

// Strict JSON: unknown keys are rejected, defaults are materialized into
// the returned spec, and validate_experiment runs before returning.
ExperimentSpec parse_experiment(const std::string& json_text);
std::string render_experiment(const ExperimentSpec& spec);

}  // namespace cavityspec
