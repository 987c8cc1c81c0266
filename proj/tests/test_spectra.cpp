#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "cavityspec/dynamics.hpp"
#include "cavityspec/scenarios.hpp"
#include "cavityspec/spectra.hpp"

using namespace cavityspec;

namespace {

SingleExcitationState random_field(const ModeBasis& basis, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> dist;
    SingleExcitationState state;
    state.mode_amp.resize(basis.mode_count());
    for (auto& c : state.mode_amp) c = Complex{dist(gen), dist(gen)};
    return normalize(std::move(state));
}

Spectrum make_spectrum(std::vector<double> freq, std::vector<double> s) {
    Spectrum out;
    out.frequency = std::move(freq);
    out.intensity = std::move(s);
    return out;
}

}  // namespace

TEST_CASE("filters evaluate as documented") {
    const SpatialFilter unit = SpatialFilter::unit();
    CHECK(unit(0.3) == 1.0);
    CHECK(unit.separable());

    const SpatialFilter box = SpatialFilter::boxcar(1.0, 2.0);
    CHECK(box(0.99) == 0.0);
    CHECK(box(1.0) == 1.0);
    CHECK(box(1.7) == 1.0);
    CHECK(box(2.01) == 0.0);
    CHECK_THROWS_AS(SpatialFilter::boxcar(2.0, 1.0), std::invalid_argument);

    const SpatialFilter gauss = SpatialFilter::gaussian(1.5, 0.2);
    CHECK(gauss(1.5) == doctest::Approx(1.0 / std::sqrt(2.0 * kPi * 0.04)));
    CHECK(gauss(1.5 + 0.2) ==
          doctest::Approx(std::exp(-0.5) / std::sqrt(2.0 * kPi * 0.04)));
    CHECK_THROWS_AS(SpatialFilter::gaussian(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("filtering the correlation kernel") {
    const ModeBasis basis = build_mode_basis(2.0 * kPi, 32);
    const SpatialGrid grid = SpatialGrid::over_basis(basis, 4);
    const CorrelationField w = corr_W(random_field(basis, 1), basis, grid);

    SUBCASE("unit filter is the identity") {
        const CorrelationField f = apply_filter(w, SpatialFilter::unit());
        CHECK((f.values - w.values).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("boxcar zeroes everything outside its quadrant") {
        const CorrelationField f =
            apply_filter(w, SpatialFilter::boxcar(0.0, basis.length / 2.0));
        for (int i = 0; i < grid.count; i += 5) {
            for (int j = 0; j < grid.count; j += 7) {
                const bool inside = grid.point(i) <= basis.length / 2.0 &&
                                    grid.point(j) <= basis.length / 2.0;
                if (!inside) CHECK(std::abs(f.values(i, j)) == 0.0);
            }
        }
    }

    SUBCASE("gaussian filter preserves hermiticity and rank one") {
        const CorrelationField f =
            apply_filter(w, SpatialFilter::gaussian(2.0, 0.7));
        std::mt19937 gen(2);
        std::uniform_int_distribution<int> pick(0, grid.count - 1);
        for (int s = 0; s < 1000; ++s) {
            const int i = pick(gen), j = pick(gen), k = pick(gen), l = pick(gen);
            CHECK(std::abs(f.values(i, j) - std::conj(f.values(j, i))) < 1e-14);
            const Complex minor =
                f.values(i, k) * f.values(j, l) - f.values(i, l) * f.values(j, k);
            CHECK(std::abs(minor) < 1e-10);
        }
    }
}

TEST_CASE("analyzer bank comb and atom construction") {
    AnalyzerBank tiny;
    tiny.label = "tiny";
    tiny.n_atoms = 3;
    tiny.omega_min = 1.0;
    tiny.omega_max = 3.0;
    tiny.position = 1.0;
    tiny.decay_rate = 0.05;
    tiny.t_on = 0.0;
    tiny.t_read = 1.0;
    CHECK(tiny.comb() == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(tiny.comb_spacing() == 1.0);

    AnalyzerBank bank;
    bank.label = "wide";
    bank.n_atoms = 200;
    bank.omega_min = 80.0;
    bank.omega_max = 120.0;
    bank.position = 1.8;
    bank.decay_rate = 0.01;
    bank.t_on = 1.5;
    bank.t_read = 4.0;
    CHECK(bank.comb_spacing() == doctest::Approx(40.0 / 199.0).epsilon(1e-14));

    const auto atoms = build_analyzer_bank(bank);
    REQUIRE(atoms.size() == 200);
    for (const auto& atom : atoms) {
        CHECK(atom.position == 1.8);
        CHECK(atom.decay_rate == 0.01);
        CHECK(atom.role == AtomRole::Analyzer);
        REQUIRE(atom.schedule.size() == 1);
        CHECK(atom.schedule[0].t_on == 1.5);
        CHECK(std::isinf(atom.schedule[0].t_off));
        CHECK(atom.dipole ==
              doctest::Approx(std::sqrt(0.01 / atom.frequency)).epsilon(1e-12));
    }
    CHECK(atoms.front().frequency == 80.0);
    CHECK(atoms.back().frequency == 120.0);

    bank.decay_rate = 1.0;  // comb cannot resolve itself
    CHECK_THROWS_AS(validate_bank(bank, 2.0 * kPi), std::invalid_argument);
}

TEST_CASE("analyzer spectrum readout rules") {
    AnalyzerBank bank;
    bank.label = "b";
    bank.n_atoms = 4;
    bank.omega_min = 10.0;
    bank.omega_max = 16.0;
    bank.position = 1.0;
    bank.decay_rate = 0.1;
    bank.t_on = 0.0;
    bank.t_read = 2.0;

    SingleExcitationState state;
    state.mode_amp.assign(8, Complex{0.0, 0.0});
    state.atom_amp = {Complex{0.1, 0.0}, Complex{0.0, 0.2}, Complex{0.0, 0.0},
                      Complex{0.3, 0.0}};
    state.time = 3.0;

    const Spectrum s = analyzer_spectrum(state, bank, 0);
    CHECK(s.frequency == std::vector<double>{10.0, 12.0, 14.0, 16.0});
    CHECK(s.intensity[0] == doctest::Approx(0.01));
    CHECK(s.intensity[1] == doctest::Approx(0.04));
    CHECK(s.intensity[3] == doctest::Approx(0.09));
    CHECK(s.provenance == SpectrumProvenance::Analyzer);

    state.time = 1.0;  // before the configured readout
    CHECK_THROWS_AS(analyzer_spectrum(state, bank, 0), std::invalid_argument);
    state.time = 3.0;
    CHECK_THROWS_AS(analyzer_spectrum(state, bank, 5), std::out_of_range);

    // a bank that never saw radiation normalizes to nothing
    for (auto& c : state.atom_amp) c = Complex{0.0, 0.0};
    CHECK_THROWS_AS(normalize_spectrum(analyzer_spectrum(state, bank, 0)),
                    DegenerateSpectrumError);
}

TEST_CASE("normalize_spectrum") {
    const auto flat = normalize_spectrum(
        make_spectrum({80.0, 100.0, 120.0}, {5.0, 5.0, 5.0}));
    CHECK(flat.intensity[0] == doctest::Approx(1.0 / 40.0).epsilon(1e-12));
    CHECK(flat.normalized);
    CHECK(flat.raw_area == doctest::Approx(200.0));

    SUBCASE("idempotent") {
        const auto twice = normalize_spectrum(flat);
        for (std::size_t i = 0; i < flat.intensity.size(); ++i)
            CHECK(twice.intensity[i] == flat.intensity[i]);
        CHECK(twice.raw_area == flat.raw_area);
    }

    SUBCASE("scale invariant") {
        auto scaled = make_spectrum({80.0, 100.0, 120.0}, {15.0, 15.0, 15.0});
        const auto normalized = normalize_spectrum(scaled);
        for (std::size_t i = 0; i < flat.intensity.size(); ++i)
            CHECK(normalized.intensity[i] ==
                  doctest::Approx(flat.intensity[i]).epsilon(1e-12));
    }

    CHECK_THROWS_AS(normalize_spectrum(make_spectrum({1.0, 2.0}, {0.0, 0.0})),
                    DegenerateSpectrumError);
}

TEST_CASE("compare_spectra metrics") {
    const auto a = normalize_spectrum(
        make_spectrum({0.0, 1.0, 2.0, 3.0, 4.0}, {0.0, 1.0, 0.0, 0.0, 0.0}));
    SUBCASE("identical spectra give zero distances") {
        const auto cmp = compare_spectra(a, a);
        CHECK(cmp.l1 == 0.0);
        CHECK(cmp.linf == 0.0);
        CHECK(cmp.peak_shift == 0.0);
    }
    SUBCASE("disjoint delta-like spectra on a shared grid saturate at 2") {
        const auto b = normalize_spectrum(
            make_spectrum({0.0, 1.0, 2.0, 3.0, 4.0}, {0.0, 0.0, 0.0, 1.0, 0.0}));
        const auto cmp = compare_spectra(a, b);
        CHECK(cmp.l1 == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(cmp.peak_shift == doctest::Approx(2.0));
    }
    SUBCASE("disjoint supports are rejected") {
        const auto b =
            normalize_spectrum(make_spectrum({10.0, 11.0}, {1.0, 1.0}));
        CHECK_THROWS_AS(compare_spectra(a, b), ComparisonError);
    }
}

TEST_CASE("filtered mode spectrum recovers mode powers under the unit filter") {
    const ModeBasis basis = build_mode_basis(2.0 * kPi, 64);
    const auto psi = random_field(basis, 9);
    const SpatialGrid grid = SpatialGrid::over_basis(basis, 8);
    const Spectrum s =
        filtered_mode_spectrum(psi, basis, SpatialFilter::unit(), grid);
    REQUIRE(s.frequency.size() == static_cast<std::size_t>(basis.mode_count()));
    double l1 = 0.0;
    for (int n = 0; n < basis.mode_count(); ++n)
        l1 += std::abs(s.intensity[n] - std::norm(psi.mode_amp[n]));
    CHECK(l1 < 1e-6);

    SingleExcitationState vacuum;
    vacuum.mode_amp.assign(basis.mode_count(), Complex{0.0, 0.0});
    CHECK_THROWS_AS(
        filtered_mode_spectrum(vacuum, basis, SpatialFilter::unit(), grid),
        DegenerateFieldError);
}

TEST_CASE("separable fast path matches the generic W-kernel route") {
    const ModeBasis basis = build_mode_basis(2.0 * kPi, 48);
    const auto psi = random_field(basis, 10);
    const SpatialGrid grid = SpatialGrid::over_basis(basis, 8);
    for (const SpatialFilter& filter :
         {SpatialFilter::boxcar(1.0, 4.0), SpatialFilter::gaussian(3.0, 0.8)}) {
        const Spectrum fast = filtered_mode_spectrum(psi, basis, filter, grid);
        const ModeReconstruction slow = reconstruct_products_from_W(
            apply_filter(corr_W(psi, basis, grid), filter), basis);
        double l1 = 0.0;
        for (int n = 0; n < basis.mode_count(); ++n)
            l1 += std::abs(fast.intensity[n] - std::norm(slow.amplitudes[n]));
        CHECK(l1 < 1e-9);
    }
}

TEST_CASE("spectral peak, dip, and width analysis") {
    // two gaussian lines on a fine grid
    std::vector<double> freq, s;
    for (int i = 0; i <= 2000; ++i) {
        const double w = 80.0 + 0.02 * i;
        freq.push_back(w);
        s.push_back(std::exp(-0.5 * std::pow((w - 95.0) / 1.2, 2)) +
                    0.5 * std::exp(-0.5 * std::pow((w - 105.0) / 0.5, 2)));
    }
    const auto spectrum = make_spectrum(freq, s);

    const auto peaks = find_spectral_peaks(spectrum, 0.05, 0.05);
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0].frequency == doctest::Approx(95.0).epsilon(1e-3));
    CHECK(peaks[1].frequency == doctest::Approx(105.0).epsilon(1e-3));

    const auto dips = find_spectral_dips(spectrum, 0.05);
    REQUIRE(dips.size() == 1);
    CHECK(dips[0].frequency > 95.0);
    CHECK(dips[0].frequency < 105.0);

    // FWHM of a gaussian line is 2 sqrt(2 ln 2) sigma
    CHECK(peak_fwhm(spectrum, 95.0) ==
          doctest::Approx(2.3548 * 1.2).epsilon(1e-2));
    CHECK(peak_fwhm(spectrum, 105.0) ==
          doctest::Approx(2.3548 * 0.5).epsilon(1e-2));

    CHECK(intensity_at(spectrum, 95.0) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(intensity_at(spectrum, 60.0) == 0.0);
}

TEST_CASE("narrowing a window can only blur spectral features") {
    // Free packet against boxcar windows narrower than the packet: the
    // measured width of the dominant line is set by the window.
    const ModeBasis basis = build_mode_basis(2.0 * kPi, 120);
    const auto psi = gaussian_photon_state(basis, GaussianPhotonSpec{30.0, 1.0, kPi});
    const SpatialGrid grid = SpatialGrid::over_basis(basis, 8);
    double previous = 1e300;
    for (double width : {0.4, 0.8, 1.6, 3.0}) {
        const Spectrum s = normalize_spectrum(filtered_mode_spectrum(
            psi, basis, SpatialFilter::boxcar(kPi - width / 2, kPi + width / 2),
            grid));
        const double fwhm = peak_fwhm(s, 30.0);
        CHECK(fwhm <= previous * 1.001);
        previous = fwhm;
    }
}
