#pragma once

// The two spectrum pipelines:
//   (a) local mode spectra from spatially filtered correlation kernels
//       W_F(r1, r2) = g(r1) g(r2) W(r1, r2), reconstructed mode by mode;
//   (b) analyzer-atom spectra: a comb of weakly coupled two-level atoms at
//       one position whose excitation probabilities, read after the
//       radiation has passed, trace out the local spectrum.
// Plus unit-area normalization and the metrics used to compare the two.

#include <optional>
#include <string>
#include <vector>

#include "cavityspec/core.hpp"
#include "cavityspec/observables.hpp"

namespace cavityspec {

struct DegenerateSpectrumError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Spectra whose frequency supports do not overlap cannot be compared.
struct ComparisonError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SpatialFilter {
    enum class Kind { Unit, Gaussian, Boxcar };

    Kind kind = Kind::Unit;
    double center = 0.0;   // gaussian
    double sigma = 0.0;    // gaussian
    double r_min = 0.0;    // boxcar
    double r_max = 0.0;    // boxcar

    // All built-in filters factorize: g(r1, r2) = g(r1) g(r2).
    bool separable() const { return true; }

    double operator()(double r) const;
    std::string describe() const;

    static SpatialFilter unit();
    static SpatialFilter gaussian(double center, double sigma);
    static SpatialFilter boxcar(double r_min, double r_max);
};

CorrelationField apply_filter(const CorrelationField& field,
                              const SpatialFilter& filter);

// A comb of analyzer atoms sharing one position and one small decay
// constant, with resonance frequencies
//   omega_n = omega_min + (n - 1) * d_omega,  d_omega = (omega_max - omega_min)/(N - 1).
struct AnalyzerBank {
    std::string label;
    int n_atoms = 0;
    double omega_min = 0.0;
    double omega_max = 0.0;
    double position = 0.0;
    double decay_rate = 0.0;  // gamma_a, <= comb spacing / 10
    double t_on = 0.0;
    double t_read = 0.0;

    double comb_spacing() const { return (omega_max - omega_min) / (n_atoms - 1); }
    std::vector<double> comb() const;
};

void validate_bank(const AnalyzerBank& bank, double cavity_length);

std::vector<AtomSpec> build_analyzer_bank(const AnalyzerBank& bank);

enum class SpectrumProvenance { Analyzer, ModeReconstruction, InitialState };

std::string to_string(SpectrumProvenance p);

struct Spectrum {
    std::vector<double> frequency;  // strictly increasing
    std::vector<double> intensity;  // >= 0
    bool normalized = false;
    double raw_area = 0.0;  // trapezoid area before normalization
    SpectrumProvenance provenance = SpectrumProvenance::ModeReconstruction;
    std::string label;
};

// Mode powers |c_p|^2 of the filtered field against omega_p, unnormalized.
// Separable filters collapse the double integral of the reconstruction to
// products of single integrals, so the kernel W is never materialized.
Spectrum filtered_mode_spectrum(const SingleExcitationState& state,
                                const ModeBasis& basis,
                                const SpatialFilter& filter,
                                const SpatialGrid& grid);

// Bank excitations |c_atom|^2 against the comb frequencies, unnormalized.
// The bank's atoms occupy state indices [first_atom_index,
// first_atom_index + n_atoms). Reading before t_read is a contract error.
Spectrum analyzer_spectrum(const SingleExcitationState& state,
                           const AnalyzerBank& bank, int first_atom_index);

// Rescales to unit trapezoid area. All-zero input raises
// DegenerateSpectrumError; normalizing twice is a no-op.
Spectrum normalize_spectrum(Spectrum s);

struct SpectrumComparison {
    double l1 = 0.0;         // integral |a - b| d omega on the common support
    double linf = 0.0;
    double peak_shift = 0.0; // |argmax_a - argmax_b|
};

// Interpolates both spectra onto their common support, renormalizes each
// to unit area there, and reports the distances. For unit-area spectra on
// a shared grid this matches the plain L1/Linf definitions; restricting
// to the overlap keeps mild support truncation from masquerading as
// disagreement.
SpectrumComparison compare_spectra(const Spectrum& a, const Spectrum& b);

// --- spectrum shape analysis -------------------------------------------

struct SpectralFeature {
    double frequency = 0.0;
    double intensity = 0.0;   // height of the peak / depth point of the dip
    double prominence = 0.0;
};

// Interior local maxima with height and topographic prominence at least
// the given fractions of the global maximum.
std::vector<SpectralFeature> find_spectral_peaks(const Spectrum& s,
                                                 double min_height_frac = 0.05,
                                                 double min_prominence_frac = 0.05);

// Interior local minima with prominence (measured on the inverted curve)
// at least the given fraction of the global maximum.
std::vector<SpectralFeature> find_spectral_dips(const Spectrum& s,
                                                double min_prominence_frac = 0.05);

// Linear interpolation of the sampled intensity; zero outside the support.
double intensity_at(const Spectrum& s, double omega);

// Full width at half maximum of the peak nearest `near_frequency`,
// measured at half the local peak height with interpolated crossings.
double peak_fwhm(const Spectrum& s, double near_frequency);

}  // namespace cavityspec
