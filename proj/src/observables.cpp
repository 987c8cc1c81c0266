#include "cavityspec/observables.hpp"

#include <cmath>

namespace cavityspec {

SpatialGrid SpatialGrid::over_basis(const ModeBasis& basis, int oversample) {
    SpatialGrid grid;
    grid.length = basis.length;
    grid.count = oversample * basis.mode_count() + 1;
    validate_grid(grid, basis);
    return grid;
}

void validate_grid(const SpatialGrid& grid, const ModeBasis& basis) {
    if (grid.count < 4 * basis.mode_count() || grid.count < 2)
        throw std::invalid_argument(
            "spatial grid too coarse: need at least 4 samples per shortest mode");
    if (std::abs(grid.length - basis.length) > 1e-12 * basis.length)
        throw std::invalid_argument("spatial grid length does not match the cavity");
}

namespace {

// sum_n coeffs[n-1] * sin(n*theta) by the three-term recurrence
// sin((n+1)t) = 2 cos(t) sin(nt) - sin((n-1)t); no trig in the loop.
Complex sin_series(double theta, const std::vector<Complex>& coeffs) {
    const double c2 = 2.0 * std::cos(theta);
    double s_prev = 0.0;
    double s = std::sin(theta);
    Complex acc{0.0, 0.0};
    for (const Complex& a : coeffs) {
        acc += a * s;
        const double s_next = c2 * s - s_prev;
        s_prev = s;
        s = s_next;
    }
    return acc;
}

std::vector<Complex> t_field_coeffs(const SingleExcitationState& state,
                                    const ModeBasis& basis) {
    const int nm = basis.mode_count();
    if (static_cast<int>(state.mode_amp.size()) != nm)
        throw std::invalid_argument("state/basis mode count mismatch");
    std::vector<Complex> coeffs(nm);
    for (int n = 0; n < nm; ++n)
        coeffs[n] = std::sqrt(basis.frequency[n] / basis.length) * state.mode_amp[n];
    return coeffs;
}

double trapezoid_weight(const SpatialGrid& grid, int i) {
    const double h = grid.spacing();
    return (i == 0 || i == grid.count - 1) ? 0.5 * h : h;
}

}  // namespace

std::complex<double> eval_T(const SingleExcitationState& state,
                            const ModeBasis& basis, double r) {
    return sin_series(kPi * r / basis.length, t_field_coeffs(state, basis));
}

Eigen::VectorXcd sample_T(const SingleExcitationState& state,
                          const ModeBasis& basis, const SpatialGrid& grid) {
    const auto coeffs = t_field_coeffs(state, basis);
    Eigen::VectorXcd values(grid.count);
    for (int i = 0; i < grid.count; ++i)
        values[i] = sin_series(kPi * grid.point(i) / basis.length, coeffs);
    return values;
}

double corr_E(const SingleExcitationState& state, const ModeBasis& basis,
              double r1, double r2) {
    const Complex w = std::conj(eval_T(state, basis, r1)) * eval_T(state, basis, r2);
    return 2.0 * w.real();
}

Complex corr_B(const SingleExcitationState& state, const ModeBasis& basis,
               double r1, double r2) {
    const Complex w = std::conj(eval_T(state, basis, r1)) * eval_T(state, basis, r2);
    return Complex(0.0, 2.0 * w.imag());
}

CorrelationField corr_W(const SingleExcitationState& state,
                        const ModeBasis& basis, const SpatialGrid& grid) {
    CorrelationField field;
    field.grid = grid;
    field.time = state.time;
    const Eigen::VectorXcd t = sample_T(state, basis, grid);
    field.values = t.conjugate() * t.transpose();
    return field;
}

double energy_density(const SingleExcitationState& state, const ModeBasis& basis,
                      double r) {
    return std::norm(eval_T(state, basis, r));
}

Eigen::VectorXd energy_density_profile(const SingleExcitationState& state,
                                       const ModeBasis& basis,
                                       const SpatialGrid& grid) {
    return sample_T(state, basis, grid).cwiseAbs2();
}

Eigen::VectorXcd project_onto_modes(const Eigen::VectorXcd& grid_values,
                                    const ModeBasis& basis,
                                    const SpatialGrid& grid) {
    if (grid_values.size() != grid.count)
        throw std::invalid_argument("project_onto_modes: value/grid size mismatch");
    const int nm = basis.mode_count();
    Eigen::VectorXcd integrals = Eigen::VectorXcd::Zero(nm);
    for (int i = 0; i < grid.count; ++i) {
        const Complex f = trapezoid_weight(grid, i) * grid_values[i];
        if (f == Complex{0.0, 0.0}) continue;
        const double theta = kPi * grid.point(i) / grid.length;
        const double c2 = 2.0 * std::cos(theta);
        double s_prev = 0.0;
        double s = std::sin(theta);
        for (int m = 0; m < nm; ++m) {
            integrals[m] += f * s;
            const double s_next = c2 * s - s_prev;
            s_prev = s;
            s = s_next;
        }
    }
    return integrals;
}

Eigen::VectorXcd reconstruct_from_T(const SingleExcitationState& state,
                                    const ModeBasis& basis,
                                    const SpatialGrid& grid) {
    validate_grid(grid, basis);
    Eigen::VectorXcd amps =
        project_onto_modes(sample_T(state, basis, grid), basis, grid);
    for (int m = 0; m < basis.mode_count(); ++m)
        amps[m] *= 2.0 / std::sqrt(basis.frequency[m] * basis.length);
    return amps;
}

ModeReconstruction reconstruct_products_from_W(const CorrelationField& field,
                                               const ModeBasis& basis) {
    validate_grid(field.grid, basis);
    const SpatialGrid& grid = field.grid;
    const int nm = basis.mode_count();
    const int ng = grid.count;
    if (field.values.rows() != ng || field.values.cols() != ng)
        throw std::invalid_argument("reconstruct_products_from_W: field/grid mismatch");

    // Weighted sine samples P[m][i] = w_i sin(k_m r_i); the double integral
    // factorizes into A = P W and G[m][p] = (A P^T)[m][p].
    Eigen::MatrixXd p(nm, ng);
    for (int i = 0; i < ng; ++i) {
        const double w = trapezoid_weight(grid, i);
        const double theta = kPi * grid.point(i) / grid.length;
        const double c2 = 2.0 * std::cos(theta);
        double s_prev = 0.0;
        double s = std::sin(theta);
        for (int m = 0; m < nm; ++m) {
            p(m, i) = w * s;
            const double s_next = c2 * s - s_prev;
            s_prev = s;
            s = s_next;
        }
    }
    Eigen::MatrixXcd a(nm, ng);
    a.real() = p * field.values.real();
    a.imag() = p * field.values.imag();

    // Mode powers |c_p|^2 from the diagonal products p = ref.
    Eigen::VectorXd power(nm);
    for (int m = 0; m < nm; ++m) {
        const Complex g = (a.row(m).array() * p.row(m).array()).sum();
        power[m] = g.real() * 4.0 / (basis.length * basis.frequency[m]);
    }
    int ref = 0;
    const double max_power = power.maxCoeff(&ref);
    if (!(max_power > 0.0))
        throw DegenerateFieldError(
            "reconstruct_products_from_W: correlation field is numerically zero");
    if (power[0] >= 1e-12 * max_power) ref = 0;

    ModeReconstruction rec;
    rec.reference_mode = ref;
    rec.amplitudes.resize(nm);
    const double c_ref = std::sqrt(std::max(power[ref], 0.0));
    for (int m = 0; m < nm; ++m) {
        // c_ref^* c_m, then divide out the (real) reference amplitude.
        const Complex g = (a.row(ref).array() * p.row(m).array()).sum();
        const Complex product =
            g * (4.0 / (basis.length * std::sqrt(basis.frequency[ref] *
                                                 basis.frequency[m])));
        rec.amplitudes[m] = product / c_ref;
    }
    rec.amplitudes[ref] = c_ref;
    return rec;
}

}  // namespace cavityspec
