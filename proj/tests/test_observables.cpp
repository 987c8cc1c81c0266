#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "cavityspec/dynamics.hpp"
#include "cavityspec/observables.hpp"
#include "cavityspec/scenarios.hpp"

using namespace cavityspec;

namespace {

SingleExcitationState single_mode_state(const ModeBasis& basis, int index) {
    SingleExcitationState state;
    state.mode_amp.assign(basis.mode_count(), Complex{0.0, 0.0});
    state.mode_amp[index] = Complex{1.0, 0.0};
    return state;
}

SingleExcitationState random_state(const ModeBasis& basis, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> dist;
    SingleExcitationState state;
    state.mode_amp.resize(basis.mode_count());
    for (auto& c : state.mode_amp) c = Complex{dist(gen), dist(gen)};
    return normalize(std::move(state));
}

}  // namespace

TEST_CASE("grid construction and validation") {
    const ModeBasis basis = build_mode_basis(2.0 * kPi, 100);
    const SpatialGrid grid = SpatialGrid::over_basis(basis, 8);
    CHECK(grid.count == 801);
    CHECK(grid.point(0) == 0.0);
    CHECK(grid.point(grid.count - 1) == doctest::Approx(basis.length).epsilon(1e-12));
    CHECK_THROWS_AS(validate_grid(SpatialGrid{basis.length, 150}, basis),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_grid(SpatialGrid{1.0, 801}, basis),
                    std::invalid_argument);
}

TEST_CASE("T field of a single mode has the closed form") {
    const ModeBasis basis = build_mode_basis(kPi, 4);
    const auto state = single_mode_state(basis, 0);  // omega_1 = 1, L = pi
    for (double r : {0.3, 1.1, 2.0}) {
        const Complex t = eval_T(state, basis, r);
        CHECK(t.real() ==
              doctest::Approx(std::sqrt(1.0 / kPi) * std::sin(r)).epsilon(1e-12));
        CHECK(t.imag() == 0.0);
    }
    CHECK(std::abs(eval_T(state, basis, 0.0)) == 0.0);
    CHECK(std::abs(eval_T(state, basis, basis.length)) < 1e-12);
}

TEST_CASE("batched T sampling matches pointwise evaluation") {
    const ModeBasis basis = build_mode_basis(2.0 * kPi, 64);
    const auto state = random_state(basis, 11);
    const SpatialGrid grid = SpatialGrid::over_basis(basis, 4);
    const Eigen::VectorXcd t = sample_T(state, basis, grid);
    for (int i = 0; i < grid.count; i += 37)
        CHECK(std::abs(t[i] - eval_T(state, basis, grid.point(i))) < 1e-11);
}

TEST_CASE("E correlation: diagonal positivity, symmetry, closed form") {
    const ModeBasis basis = build_mode_basis(kPi, 4);
    const auto state = single_mode_state(basis, 0);
    const double expected = 2.0 * (1.0 / kPi) * std::sin(0.4) * std::sin(1.3);
    CHECK(corr_E(state, basis, 0.4, 1.3) == doctest::Approx(expected).epsilon(1e-12));

    const ModeBasis wide = build_mode_basis(2.0 * kPi, 64);
    const auto psi = random_state(wide, 5);
    CHECK(corr_E(psi, wide, 1.0, 1.0) >= 0.0);
    CHECK(corr_E(psi, wide, 1.0, 1.0) ==
          doctest::Approx(2.0 * energy_density(psi, wide, 1.0)).epsilon(1e-12));
    CHECK(corr_E(psi, wide, 0.7, 2.9) == corr_E(psi, wide, 2.9, 0.7));
}

TEST_CASE("B correlation: antisymmetric, imaginary, zero for real amplitudes") {
    const ModeBasis basis = build_mode_basis(2.0 * kPi, 64);
    const auto psi = random_state(basis, 6);
    CHECK(std::abs(corr_B(psi, basis, 1.2, 1.2)) == 0.0);
    const Complex b = corr_B(psi, basis, 0.8, 2.4);
    CHECK(b.real() == 0.0);
    CHECK(std::abs(corr_B(psi, basis, 2.4, 0.8) + b) < 1e-15);

    auto real_amp = psi;
    for (auto& c : real_amp.mode_amp) c = Complex{std::abs(c), 0.0};
    real_amp = normalize(std::move(real_amp));
    CHECK(std::abs(corr_B(real_amp, basis, 0.8, 2.4)) < 1e-14);
}

TEST_CASE("W kernel: hermitian, rank one, consistent with E and B views") {
    const ModeBasis basis = build_mode_basis(2.0 * kPi, 48);
    const auto psi = random_state(basis, 7);
    const SpatialGrid grid = SpatialGrid::over_basis(basis, 4);
    const CorrelationField w = corr_W(psi, basis, grid);

    double herm = 0.0;
    for (int i = 0; i < grid.count; i += 3)
        for (int j = 0; j < grid.count; j += 5)
            herm = std::max(herm,
                            std::abs(w.values(i, j) - std::conj(w.values(j, i))));
    CHECK(herm == 0.0);

    std::mt19937 gen(3);
    std::uniform_int_distribution<int> pick(0, grid.count - 1);
    for (int s = 0; s < 2000; ++s) {
        const int i = pick(gen), j = pick(gen), k = pick(gen), l = pick(gen);
        const Complex minor = w.values(i, k) * w.values(j, l) -
                              w.values(i, l) * w.values(j, k);
        CHECK(std::abs(minor) < 1e-10);
    }

    for (int i = 0; i < grid.count; i += 57) {
        const double r1 = grid.point(i);
        const double r2 = grid.point((i * 3 + 11) % grid.count);
        const int j = (i * 3 + 11) % grid.count;
        CHECK(std::abs(corr_E(psi, basis, r1, r2) - 2.0 * w.values(i, j).real()) <
              1e-12);
        const Complex b = corr_B(psi, basis, r1, r2);
        CHECK(std::abs(b - Complex(0.0, 2.0 * w.values(i, j).imag())) < 1e-12);
        CHECK(w.values(i, i).real() ==
              doctest::Approx(energy_density(psi, basis, r1)).epsilon(1e-12));
    }
}

TEST_CASE("energy density integrates to half the mode-space energy") {
    // integral |T|^2 dr = (1/2) sum omega_n |c_n|^2, from the sin^2
    // normalization integral L/2.
    const ModeBasis basis = build_mode_basis(2.0 * kPi, 400);
    const auto state =
        gaussian_photon_state(basis, GaussianPhotonSpec{100.0, 2.0 * kPi, 2.0});
    const SpatialGrid grid = SpatialGrid::over_basis(basis, 8);
    const Eigen::VectorXd u = energy_density_profile(state, basis, grid);
    double quadrature = 0.0;
    for (int i = 0; i < grid.count; ++i) {
        const double w = (i == 0 || i == grid.count - 1) ? 0.5 : 1.0;
        quadrature += w * u[i] * grid.spacing();
    }
    double mode_energy = 0.0;
    for (int n = 0; n < basis.mode_count(); ++n)
        mode_energy += basis.frequency[n] * std::norm(state.mode_amp[n]);
    CHECK(quadrature == doctest::Approx(0.5 * mode_energy).epsilon(1e-6));

    SingleExcitationState empty;
    empty.mode_amp.assign(basis.mode_count(), Complex{0.0, 0.0});
    CHECK(energy_density(empty, basis, 1.0) == 0.0);
}

TEST_CASE("mode projection round-trips the stored amplitudes") {
    const ModeBasis basis = build_mode_basis(2.0 * kPi, 96);
    const auto psi = random_state(basis, 12);
    const SpatialGrid grid = SpatialGrid::over_basis(basis, 8);
    const Eigen::VectorXcd rec = reconstruct_from_T(psi, basis, grid);
    double worst = 0.0;
    for (int n = 0; n < basis.mode_count(); ++n)
        worst = std::max(worst, std::abs(rec[n] - psi.mode_amp[n]));
    CHECK(worst < 1e-6);

    // single mode recovers exactly up to roundoff
    const auto one = single_mode_state(basis, 17);
    const Eigen::VectorXcd rec1 = reconstruct_from_T(one, basis, grid);
    CHECK(std::abs(rec1[17] - Complex{1.0, 0.0}) < 1e-10);
    for (int n = 0; n < basis.mode_count(); ++n)
        if (n != 17) CHECK(std::abs(rec1[n]) < 1e-10);
}

TEST_CASE("windowed quadrature error shrinks monotonically with the grid") {
    // The unwindowed projections are trapezoid-exact for band-limited sine
    // series, so convergence is probed on a Gaussian-windowed integrand.
    const ModeBasis basis = build_mode_basis(2.0 * kPi, 16);
    const auto psi = random_state(basis, 20);
    const SpatialFilter window = SpatialFilter::gaussian(2.5, 0.6);

    auto windowed_projection = [&](int oversample) {
        const SpatialGrid grid = SpatialGrid::over_basis(basis, oversample);
        Eigen::VectorXcd values = sample_T(psi, basis, grid);
        for (int i = 0; i < grid.count; ++i) values[i] *= window(grid.point(i));
        return project_onto_modes(values, basis, grid);
    };

    const Eigen::VectorXcd reference = windowed_projection(512);
    double previous = 1e300;
    for (int oversample : {4, 8, 16, 32}) {
        const double err = (windowed_projection(oversample) - reference).norm();
        CHECK(err < previous);
        previous = err;
    }
}

TEST_CASE("W-kernel reconstruction recovers amplitudes and phase structure") {
    const ModeBasis basis = build_mode_basis(2.0 * kPi, 48);
    const auto psi = random_state(basis, 13);
    const SpatialGrid grid = SpatialGrid::over_basis(basis, 8);
    const CorrelationField w = corr_W(psi, basis, grid);
    const ModeReconstruction rec = reconstruct_products_from_W(w, basis);

    double l1 = 0.0;
    for (int n = 0; n < basis.mode_count(); ++n)
        l1 += std::abs(std::norm(rec.amplitudes[n]) - std::norm(psi.mode_amp[n]));
    CHECK(l1 < 1e-6);

    // reference amplitude is real and non-negative by convention
    CHECK(rec.amplitudes[rec.reference_mode].imag() == 0.0);
    CHECK(rec.amplitudes[rec.reference_mode].real() >= 0.0);

    SUBCASE("global phase invariance") {
        auto rotated = psi;
        for (auto& c : rotated.mode_amp) c *= std::polar(1.0, 0.77);
        const ModeReconstruction rec2 =
            reconstruct_products_from_W(corr_W(rotated, basis, grid), basis);
        for (int n = 0; n < basis.mode_count(); ++n)
            CHECK(std::norm(rec2.amplitudes[n]) ==
                  doctest::Approx(std::norm(rec.amplitudes[n])).epsilon(1e-9));
    }

    SUBCASE("agrees with the direct T projection") {
        const Eigen::VectorXcd direct = reconstruct_from_T(psi, basis, grid);
        double l1_paths = 0.0;
        for (int n = 0; n < basis.mode_count(); ++n)
            l1_paths +=
                std::abs(std::norm(rec.amplitudes[n]) - std::norm(direct[n]));
        CHECK(l1_paths < 1e-6);
    }
}

TEST_CASE("W reconstruction reference-mode selection") {
    const ModeBasis basis = build_mode_basis(2.0 * kPi, 32);
    const SpatialGrid grid = SpatialGrid::over_basis(basis, 8);

    SUBCASE("mode 1 is kept as reference when populated") {
        SingleExcitationState psi;
        psi.mode_amp.assign(32, Complex{0.0, 0.0});
        psi.mode_amp[0] = Complex{0.6, 0.0};
        psi.mode_amp[9] = Complex{0.0, 0.8};
        const auto rec = reconstruct_products_from_W(corr_W(psi, basis, grid), basis);
        CHECK(rec.reference_mode == 0);
        CHECK(std::norm(rec.amplitudes[9]) == doctest::Approx(0.64).epsilon(1e-9));
    }

    SUBCASE("reference promoted to the strongest mode when mode 1 is empty") {
        SingleExcitationState psi;
        psi.mode_amp.assign(32, Complex{0.0, 0.0});
        psi.mode_amp[20] = Complex{0.0, 1.0};
        const auto rec = reconstruct_products_from_W(corr_W(psi, basis, grid), basis);
        CHECK(rec.reference_mode == 20);
        CHECK(std::norm(rec.amplitudes[20]) == doctest::Approx(1.0).epsilon(1e-9));
    }

    SUBCASE("numerically zero field is rejected") {
        SingleExcitationState psi;
        psi.mode_amp.assign(32, Complex{0.0, 0.0});
        CHECK_THROWS_AS(reconstruct_products_from_W(corr_W(psi, basis, grid), basis),
                        DegenerateFieldError);
    }
}

TEST_CASE("reconstruction plus atom excitations conserve probability") {
    // Mid-scattering snapshot: reconstructed mode powers plus excited-state
    // populations must still sum to one.
    const ModeBasis basis = build_mode_basis(2.0 * kPi, 120);
    std::vector<AtomSpec> atoms{make_scatterer(kPi, 30.0, 1.0)};
    const auto photon =
        gaussian_photon_state(basis, GaussianPhotonSpec{30.0, 2.5, 2.0}, 1);
    const Schedule schedule = make_schedule(atoms, {1.2}, 0.0, 1.2);
    const Trajectory traj = evolve(photon, basis, atoms, schedule, 1.2);
    const auto& mid = traj.samples.front();
    REQUIRE(atom_excitation(mid, 0) > 1e-3);  // genuinely mid-interaction

    const SpatialGrid grid = SpatialGrid::over_basis(basis, 8);
    const Eigen::VectorXcd rec = reconstruct_from_T(mid, basis, grid);
    double total = atom_excitation(mid, 0);
    for (int n = 0; n < basis.mode_count(); ++n) total += std::norm(rec[n]);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
}
