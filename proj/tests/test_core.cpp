#include <doctest.h>

#include <cmath>
#include <complex>

#include "cavityspec/core.hpp"
#include "cavityspec/observables.hpp"

using namespace cavityspec;

TEST_CASE("mode basis wavenumbers and frequencies") {
    const ModeBasis basis = build_mode_basis(2.0 * kPi, 400);
    CHECK(basis.wavenumber.front() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(basis.wavenumber.back() == doctest::Approx(200.0).epsilon(1e-14));
    CHECK(basis.frequency.back() == doctest::Approx(200.0).epsilon(1e-14));

    const ModeBasis single = build_mode_basis(kPi, 1);
    CHECK(single.wavenumber[0] == doctest::Approx(1.0).epsilon(1e-14));

    const ModeBasis wide = build_mode_basis(8.0 * kPi, 1600);
    CHECK(wide.wavenumber.back() == doctest::Approx(200.0).epsilon(1e-14));

    // k_n = n pi / L exactly as computed, omega strictly increasing
    for (int n = 1; n <= 400; ++n) {
        CHECK(basis.wavenumber[n - 1] == n * kPi / (2.0 * kPi));
        if (n > 1) CHECK(basis.frequency[n - 1] > basis.frequency[n - 2]);
    }
}

TEST_CASE("mode basis rejects bad arguments") {
    CHECK_THROWS_AS(build_mode_basis(0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(build_mode_basis(-1.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(build_mode_basis(1.0, 0), std::invalid_argument);
}

TEST_CASE("mode functions vanish at both mirrors") {
    const ModeBasis basis = build_mode_basis(8.0 * kPi, 1600);
    for (int idx : {0, 7, 399, 1599}) {
        CHECK(basis.mode_function(idx, 0.0) == 0.0);
        CHECK(std::abs(basis.mode_function(idx, basis.length)) < 1e-10);
    }
}

TEST_CASE("sine modes are orthogonal under quadrature") {
    const ModeBasis basis = build_mode_basis(2.0 * kPi, 32);
    const int n_grid = 1025;
    const double h = basis.length / (n_grid - 1);
    for (auto [n, m] : {std::pair{0, 0}, {3, 3}, {2, 5}, {0, 31}, {17, 18}}) {
        double integral = 0.0;
        for (int i = 0; i < n_grid; ++i) {
            const double w = (i == 0 || i == n_grid - 1) ? 0.5 * h : h;
            const double r = h * i;
            integral += w * basis.mode_function(n, r) * basis.mode_function(m, r);
        }
        const double expected = (n == m) ? basis.length / 2.0 : 0.0;
        CHECK(integral == doctest::Approx(expected).epsilon(1e-10).scale(1.0));
    }
}

namespace {

const ModeBasis& reference_basis() {
    static const ModeBasis basis = build_mode_basis(2.0 * kPi, 400);
    return basis;
}

GaussianPhotonSpec reference_photon() {
    return GaussianPhotonSpec{100.0, 2.0 * kPi, 2.0};
}

}  // namespace

TEST_CASE("gaussian photon state is normalized with zero atom amplitudes") {
    const auto state = gaussian_photon_state(reference_basis(), reference_photon(), 3);
    CHECK(state.norm_sq() == doctest::Approx(1.0).epsilon(1e-10));
    for (const auto& c : state.atom_amp) CHECK(std::abs(c) == 0.0);
    CHECK(state.atom_amp.size() == 3);
}

TEST_CASE("gaussian photon state centered in k within discretization error") {
    const auto state = gaussian_photon_state(reference_basis(), reference_photon());
    double mean_k = 0.0;
    for (int n = 0; n < reference_basis().mode_count(); ++n)
        mean_k += reference_basis().wavenumber[n] * std::norm(state.mode_amp[n]);
    CHECK(std::abs(mean_k - 100.0) < 0.1);
    // symmetric about k0 within one mode spacing
    CHECK(std::abs(mean_k - 100.0) <= kPi / reference_basis().length);
}

TEST_CASE("gaussian photon energy density peaks at the packet center") {
    const auto state = gaussian_photon_state(reference_basis(), reference_photon());
    const SpatialGrid grid = SpatialGrid::over_basis(reference_basis(), 8);
    const Eigen::VectorXd u = energy_density_profile(state, reference_basis(), grid);
    int imax = 0;
    u.maxCoeff(&imax);
    CHECK(std::abs(grid.point(imax) - 2.0) <= grid.spacing());
}

TEST_CASE("gaussian photon rejects out-of-band spectra") {
    // 5 sigma support must stay inside (k_1, k_N)
    CHECK_THROWS_AS(
        gaussian_photon_state(reference_basis(), GaussianPhotonSpec{195.0, 2.0, 2.0}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        gaussian_photon_state(reference_basis(), GaussianPhotonSpec{5.0, 2.0, 2.0}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        gaussian_photon_state(reference_basis(), GaussianPhotonSpec{100.0, 0.0, 2.0}),
        std::invalid_argument);
}

namespace {

MultiGaussianBounds reference_bounds() {
    MultiGaussianBounds b;
    b.k_halfwidth = 12.0;
    b.sigma_min = 4.0;
    b.sigma_max = 8.0;
    b.r_min = 1.0;
    b.r_max = 3.0;
    return b;
}

}  // namespace

TEST_CASE("random multi-gaussian state is seed-deterministic") {
    const auto a = random_multi_gaussian_state(reference_basis(), 10, 1234, 100.0,
                                               reference_bounds());
    const auto b = random_multi_gaussian_state(reference_basis(), 10, 1234, 100.0,
                                               reference_bounds());
    for (int n = 0; n < reference_basis().mode_count(); ++n)
        CHECK(a.mode_amp[n] == b.mode_amp[n]);  // bit-identical

    const auto c = random_multi_gaussian_state(reference_basis(), 10, 1235, 100.0,
                                               reference_bounds());
    double diff = 0.0;
    for (int n = 0; n < reference_basis().mode_count(); ++n)
        diff += std::abs(a.mode_amp[n] - c.mode_amp[n]);
    CHECK(diff > 1e-3);
}

TEST_CASE("one-component random state degenerates to a gaussian photon") {
    const auto params =
        draw_multi_gaussian_params(1, 99, 100.0, reference_bounds());
    const auto drawn = random_multi_gaussian_state(reference_basis(), 1, 99, 100.0,
                                                   reference_bounds());
    const auto direct = gaussian_photon_state(
        reference_basis(), GaussianPhotonSpec{params[0].k_center, params[0].k_sigma,
                                              params[0].center_position});
    for (int n = 0; n < reference_basis().mode_count(); ++n)
        CHECK(std::abs(drawn.mode_amp[n] - direct.mode_amp[n]) < 1e-14);
}

TEST_CASE("random multi-gaussian bounds are validated") {
    MultiGaussianBounds bad = reference_bounds();
    bad.sigma_max = 30.0;  // 5 sigma support would leave the band
    CHECK_THROWS_AS(random_multi_gaussian_state(reference_basis(), 10, 1, 100.0, bad),
                    std::invalid_argument);
    bad = reference_bounds();
    bad.r_max = 5.0;  // beyond L/2
    CHECK_THROWS_AS(random_multi_gaussian_state(reference_basis(), 10, 1, 100.0, bad),
                    std::invalid_argument);
    CHECK_THROWS_AS(random_multi_gaussian_state(reference_basis(), 0, 1, 100.0,
                                                reference_bounds()),
                    std::invalid_argument);
}

TEST_CASE("normalize rescales and preserves relative phases") {
    SingleExcitationState state;
    state.mode_amp = {Complex{1.0, 1.0}, Complex{0.0, -2.0}};
    state.atom_amp = {Complex{3.0, 0.0}};
    const double ratio = std::abs(state.mode_amp[0] / state.mode_amp[1]);
    const auto unit = normalize(state);
    CHECK(unit.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(unit.mode_amp[0] / unit.mode_amp[1]) ==
          doctest::Approx(ratio).epsilon(1e-12));

    // idempotent
    const auto again = normalize(unit);
    for (std::size_t n = 0; n < unit.mode_amp.size(); ++n)
        CHECK(std::abs(again.mode_amp[n] - unit.mode_amp[n]) < 1e-15);

    SingleExcitationState zero;
    zero.mode_amp = {Complex{0.0, 0.0}};
    CHECK_THROWS_AS(normalize(zero), std::invalid_argument);
}

TEST_CASE("normalization is stable on seeded states") {
    const auto state = random_multi_gaussian_state(reference_basis(), 10, 7, 100.0,
                                                   reference_bounds());
    CHECK(std::abs(state.norm() - 1.0) < 1e-12);
}

TEST_CASE("atom validation names the problem") {
    AtomSpec atom;
    atom.position = -1.0;
    atom.frequency = 10.0;
    atom.decay_rate = 1.0;
    CHECK_THROWS_WITH_AS(validate_atom(atom, 2.0 * kPi),
                         "atom position must lie strictly inside (0, L)",
                         std::invalid_argument);
    atom.position = 1.0;
    atom.schedule = {ActivationWindow{1.0, 0.5}};
    CHECK_THROWS_AS(validate_atom(atom, 2.0 * kPi), std::invalid_argument);
    atom.schedule = {ActivationWindow{0.0, 2.0}, ActivationWindow{1.0, 3.0}};
    CHECK_THROWS_AS(validate_atom(atom, 2.0 * kPi), std::invalid_argument);
}

TEST_CASE("activation windows gate the dipole in time") {
    AtomSpec atom;
    atom.schedule = {ActivationWindow{1.0, 2.0}, ActivationWindow{3.0, 4.0}};
    CHECK_FALSE(atom.active_at(0.5));
    CHECK(atom.active_at(1.0));
    CHECK(atom.active_at(1.5));
    CHECK_FALSE(atom.active_at(2.0));
    CHECK(atom.active_at(3.5));
    CHECK_FALSE(atom.active_at(4.5));
    CHECK(AtomSpec{}.active_at(123.0));  // default schedule is always-on
}
