#pragma once

// Field-space diagnostics built on the complex spatial amplitude
//   T(r, t) = sum_n sqrt(omega_n / L) sin(k_n r) c_n(t).
// |T|^2 is the normally ordered energy density, and the kernel
//   W(r1, r2) = conj(T(r1)) T(r2)
// carries the full second-order correlation information of a
// single-excitation field: E and B correlations are its real and
// imaginary parts, and the mode amplitudes can be recovered from either
// T directly or from W.

#include <vector>

#include <Eigen/Dense>

#include "cavityspec/core.hpp"

namespace cavityspec {

// Reconstruction from a correlation field that is numerically zero.
struct DegenerateFieldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Uniform samples of [0, L] including both endpoints.
struct SpatialGrid {
    double length = 0.0;
    int count = 0;

    double spacing() const { return length / (count - 1); }
    double point(int i) const { return spacing() * i; }

    // `oversample` grid intervals per retained mode; the shortest mode
    // wavelength must be sampled at least 4 times.
    static SpatialGrid over_basis(const ModeBasis& basis, int oversample = 8);
};

void validate_grid(const SpatialGrid& grid, const ModeBasis& basis);

std::complex<double> eval_T(const SingleExcitationState& state,
                            const ModeBasis& basis, double r);

// T on every grid point. Uses the sin(n theta) recurrence per point, so
// the cost is O(N_grid * N_mode) with no trig calls in the inner loop.
Eigen::VectorXcd sample_T(const SingleExcitationState& state,
                          const ModeBasis& basis, const SpatialGrid& grid);

// <: E(r1) E(r2) :> = 2 Re W(r1, r2); real and symmetric.
double corr_E(const SingleExcitationState& state, const ModeBasis& basis,
              double r1, double r2);

// <: B(r1) B(r2) :> = 2i Im W(r1, r2); purely imaginary, antisymmetric.
Complex corr_B(const SingleExcitationState& state, const ModeBasis& basis,
               double r1, double r2);

struct CorrelationField {
    SpatialGrid grid;
    Eigen::MatrixXcd values;  // W[i][j] = conj(T(r_i)) T(r_j)
    double time = 0.0;
};

CorrelationField corr_W(const SingleExcitationState& state,
                        const ModeBasis& basis, const SpatialGrid& grid);

// Normally ordered energy density |T(r)|^2.
double energy_density(const SingleExcitationState& state, const ModeBasis& basis,
                      double r);
Eigen::VectorXd energy_density_profile(const SingleExcitationState& state,
                                       const ModeBasis& basis,
                                       const SpatialGrid& grid);

// Composite-trapezoid projections I_m = integral sin(k_m r) f(r) dr for
// every mode; the shared quadrature kernel behind both reconstruction
// routes and the filtered spectra.
Eigen::VectorXcd project_onto_modes(const Eigen::VectorXcd& grid_values,
                                    const ModeBasis& basis,
                                    const SpatialGrid& grid);

// Mode amplitudes from T via c_m = 2 / sqrt(omega_m L) * I_m.
Eigen::VectorXcd reconstruct_from_T(const SingleExcitationState& state,
                                    const ModeBasis& basis,
                                    const SpatialGrid& grid);

struct ModeReconstruction {
    Eigen::VectorXcd amplitudes;  // global phase fixed: reference mode real >= 0
    int reference_mode = 0;       // 0-based index of the phase reference
};

// Mode amplitudes from the correlation kernel: the double integrals
//   c_ref^* c_p = 4 / (L sqrt(omega_ref omega_p))
//                 * integral integral sin(k_ref r1) sin(k_p r2) W(r1, r2)
// resolved by choosing c_ref real and non-negative. Mode 1 is tried as
// the reference first; if it is unpopulated (below 1e-12 of the peak mode
// power) the most-populated mode takes over. A field with no populated
// mode at all raises DegenerateFieldError.
ModeReconstruction reconstruct_products_from_W(const CorrelationField& field,
                                               const ModeBasis& basis);

}  // namespace cavityspec
