#pragma once

// Domain types for single-excitation light in a closed 1D cavity.
//
// Natural units throughout: c = eps0 = mu0 = hbar = 1, so wavenumbers and
// angular frequencies are numerically equal and lengths/times share a unit.

#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace cavityspec {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Standing-wave sine modes of a cavity spanning [0, L].
// Mode n (1-based physics index) has k_n = n*pi/L and G_n(r) = sin(k_n r),
// vanishing at both mirrors. Stored 0-based: wavenumber[i] corresponds to
// mode n = i + 1.
struct ModeBasis {
    double length = 0.0;              // cavity length L
    std::vector<double> wavenumber;   // k_n = n*pi/L
    std::vector<double> frequency;    // omega_n = k_n (c = 1)

    int mode_count() const { return static_cast<int>(wavenumber.size()); }
    double max_frequency() const { return frequency.back(); }

    // G_n(r) = sin(k_n r) for the mode stored at `index` (0-based).
    double mode_function(int index, double r) const {
        return std::sin(wavenumber[index] * r);
    }
};

ModeBasis build_mode_basis(double length, int n_modes);

// One excitation shared between field modes and atoms:
//   |psi> = sum_n mode_amp[n] |1_n, 0> + sum_j atom_amp[j] |0, 1_j>.
struct SingleExcitationState {
    std::vector<Complex> mode_amp;
    std::vector<Complex> atom_amp;
    double time = 0.0;

    double norm_sq() const;
    double norm() const;
};

// Interval during which an atom's dipole coupling is switched on.
struct ActivationWindow {
    double t_on = -std::numeric_limits<double>::infinity();
    double t_off = std::numeric_limits<double>::infinity();
};

inline ActivationWindow always_on() { return ActivationWindow{}; }

enum class AtomRole { Scatterer, Analyzer };

// A two-level atom at a fixed position. The dipole magnitude is derived
// from the decay constant (see dipole_from_gamma in dynamics.hpp); the
// schedule lists disjoint, ordered windows during which the dipole is
// nonzero. Switching is instantaneous.
struct AtomSpec {
    double position = 0.0;     // r_j, inside (0, L)
    double frequency = 0.0;    // omega_j, resonance frequency
    double decay_rate = 0.0;   // Gamma_j
    double dipole = 0.0;       // D_j = sqrt(Gamma_j / omega_j)
    std::vector<ActivationWindow> schedule{always_on()};
    AtomRole role = AtomRole::Scatterer;

    bool active_at(double t) const {
        for (const auto& w : schedule)
            if (t >= w.t_on && t < w.t_off) return true;
        return false;
    }
};

// Throws std::invalid_argument naming the offending field.
void validate_atom(const AtomSpec& atom, double cavity_length);

// Photon wavepacket with Gaussian mode amplitudes
//   c_k ~ exp(-i k r0 - (k - k0)^2 / (4 sigma_k^2)),
// i.e. |c_k|^2 Gaussian with variance sigma_k^2, energy density a pulse
// centered at r0 moving in +r.
struct GaussianPhotonSpec {
    double k_center = 0.0;          // k0
    double k_sigma = 0.0;           // sigma_k
    double center_position = 0.0;   // r0
};

// Parameter ranges for the random multi-Gaussian initial state. Each
// component draws (k0, sigma_k, r0) uniformly from these intervals.
struct MultiGaussianBounds {
    double k_halfwidth = 0.0;   // k0 in k_center +- k_halfwidth
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    double r_min = 0.0;         // component centers, left half of the cavity
    double r_max = 0.0;
};

// Construction rejects spectra whose 5-sigma support leaves the retained
// band (truncating the mode sum there would corrupt normalization).
SingleExcitationState gaussian_photon_state(const ModeBasis& basis,
                                            const GaussianPhotonSpec& spec,
                                            int n_atoms = 0);

// Sum of n_components Gaussian profiles with seeded pseudorandom
// parameters. Same seed, same state, bit for bit.
SingleExcitationState random_multi_gaussian_state(const ModeBasis& basis,
                                                  int n_components,
                                                  std::uint64_t seed,
                                                  double k_center,
                                                  const MultiGaussianBounds& bounds,
                                                  int n_atoms = 0);

// The parameters the generator actually drew, exposed so runs can record
// them in output metadata.
struct DrawnGaussian {
    double k_center, k_sigma, center_position;
};
std::vector<DrawnGaussian> draw_multi_gaussian_params(int n_components,
                                                      std::uint64_t seed,
                                                      double k_center,
                                                      const MultiGaussianBounds& bounds);

// Rescales to unit norm, preserving relative phases. Zero vector throws.
SingleExcitationState normalize(SingleExcitationState state);

}  // namespace cavityspec
