#pragma once

// Single-excitation Hamiltonian assembly and piecewise-constant propagation.
//
// Within the one-excitation sector the Hamiltonian is a real symmetric
// matrix over [mode amplitudes | atom amplitudes]:
//   - diagonal: mode frequencies omega_n, then atom frequencies omega_j
//     (excited-state energy omega_j, ground state 0; the sigma_z offset is
//     a global phase here and is dropped),
//   - off-diagonal: the rotating-wave dipole coupling
//       K[j][n] = -sqrt(omega_n / L) * sin(k_n r_j) * D_j
//     between atom j and mode n while atom j is active, else 0.
// Atom activations switch instantaneously at schedule events, so the
// Hamiltonian is constant between consecutive events.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cavityspec/core.hpp"

namespace cavityspec {

// Thrown by the fixed-step backend when the step-halving check cannot
// reach the requested tolerance within the configured step bounds.
struct StepSizeFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Golden-rule closure for the 1D sine-mode continuum: an atom with dipole
// D and resonance omega0 decays at Gamma = D^2 * omega0 (mode spacing
// pi/L, position average sin^2 = 1/2), so D = sqrt(Gamma / omega0).
double dipole_from_gamma(double gamma, double omega0);

// Second-order radiative level shift of an atom coupled to the retained
// band. The coupling strength grows like omega, so the band pulls the
// level down by roughly Gamma * (band width) / (2 pi omega0); for the
// reference scenarios that is about -1 frequency unit, far more than the
// linewidth-resolution of the spectra. Position-averaged (sin^2 = 1/2)
// principal-value integral:
//   shift(b) = Gamma/(2 pi b) * [ b ln((b - omega_1)/(omega_N - b))
//                                 - (omega_N - omega_1) ].
double radiative_level_shift(const ModeBasis& basis, double omega_bare,
                             double gamma);

// Bare two-level splitting whose dressed resonance (bare + shift) lands at
// omega_dressed. Scenario builders use this so "an atom on resonance with
// the photon at omega" means resonant after renormalization.
double bare_frequency_for_resonance(const ModeBasis& basis, double omega_dressed,
                                    double gamma);

struct CoupledHamiltonian {
    int n_modes = 0;
    int n_atoms = 0;
    Eigen::VectorXd diagonal;   // size n_modes + n_atoms
    Eigen::MatrixXd coupling;   // n_atoms x n_modes, zero rows for inactive atoms
    double valid_from = 0.0;    // activation pattern fixed on [valid_from, valid_until)
    double valid_until = 0.0;

    int dimension() const { return n_modes + n_atoms; }

    // Dense symmetric matrix [[diag_modes, K^T], [K, diag_atoms]].
    Eigen::MatrixXd to_dense() const;

    // y = H x on a packed [modes | atoms] complex vector.
    void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const;

    // <psi|H|psi> (real for any state since H is real symmetric).
    double expectation(const SingleExcitationState& state) const;
};

CoupledHamiltonian assemble_hamiltonian(const ModeBasis& basis,
                                        const std::vector<AtomSpec>& atoms,
                                        double t);

// Activation-change instants and requested output instants for one run.
struct Schedule {
    std::vector<double> event_times;    // strictly increasing, within (t0, t_end)
    std::vector<double> sample_times;   // sorted; full states are returned here
};

// Collects every schedule edge of `atoms` that falls inside (t0, t_end).
Schedule make_schedule(const std::vector<AtomSpec>& atoms,
                       std::vector<double> sample_times,
                       double t0, double t_end);

enum class PropagatorBackend {
    Eigendecomposition,  // exact exponential per interval (default)
    RungeKutta4,         // fixed-step RK4, step <= max_step
};

struct EvolveOptions {
    PropagatorBackend backend = PropagatorBackend::Eigendecomposition;
    double max_step = 0.0;        // RK4 step bound; 0 -> 0.02 / omega_max
    double tolerance = 1e-6;      // per-amplitude target for the halving check
    bool verify_convergence = false;  // RK4 only: re-run at h/2 and compare
    // Dense excitation sampling for selected atoms, cheaper than storing
    // full states at every trace instant.
    std::vector<double> trace_times;
    std::vector<int> traced_atoms;
};

struct Trajectory {
    std::vector<SingleExcitationState> samples;        // at schedule.sample_times
    std::vector<std::vector<double>> traces;           // [traced atom][trace time]
    double norm_drift_rate = 0.0;      // max |d||psi||^2/dt| observed
    double energy_rel_drift = 0.0;     // max per-interval relative <H> drift
    std::vector<std::string> warnings;
};

// Solves i dc/dt = H c through the schedule, holding H fixed between
// events. Propagation is linear, so callers may pass unnormalized states;
// physics runs are expected to start from unit norm.
Trajectory evolve(const SingleExcitationState& initial, const ModeBasis& basis,
                  const std::vector<AtomSpec>& atoms, const Schedule& schedule,
                  double t_end, const EvolveOptions& options = {});

// |c_atom[j]|^2, the excited-state population of atom j.
double atom_excitation(const SingleExcitationState& state, int atom_index);

}  // namespace cavityspec
