#include "cavityspec/core.hpp"

#include <cmath>
#include <random>

namespace cavityspec {

ModeBasis build_mode_basis(double length, int n_modes) {
    if (!(length > 0.0))
        throw std::invalid_argument("build_mode_basis: length must be positive");
    if (n_modes < 1)
        throw std::invalid_argument("build_mode_basis: n_modes must be >= 1");
    ModeBasis basis;
    basis.length = length;
    basis.wavenumber.resize(n_modes);
    basis.frequency.resize(n_modes);
    for (int n = 1; n <= n_modes; ++n) {
        const double k = static_cast<double>(n) * kPi / length;
        basis.wavenumber[n - 1] = k;
        basis.frequency[n - 1] = k;  // omega = c k, c = 1
    }
    return basis;
}

double SingleExcitationState::norm_sq() const {
    double s = 0.0;
    for (const auto& c : mode_amp) s += std::norm(c);
    for (const auto& c : atom_amp) s += std::norm(c);
    return s;
}

double SingleExcitationState::norm() const { return std::sqrt(norm_sq()); }

void validate_atom(const AtomSpec& atom, double cavity_length) {
    if (!(atom.position > 0.0 && atom.position < cavity_length))
        throw std::invalid_argument("atom position must lie strictly inside (0, L)");
    if (!(atom.frequency > 0.0))
        throw std::invalid_argument("atom frequency must be positive");
    if (!(atom.decay_rate >= 0.0))
        throw std::invalid_argument("atom decay_rate must be non-negative");
    double prev_off = -std::numeric_limits<double>::infinity();
    for (const auto& w : atom.schedule) {
        if (!(w.t_on < w.t_off))
            throw std::invalid_argument("atom schedule window must have t_on < t_off");
        if (w.t_on < prev_off)
            throw std::invalid_argument("atom schedule windows must be disjoint and ordered");
        prev_off = w.t_off;
    }
}

namespace {

void check_in_band(const ModeBasis& basis, double k_center, double k_sigma) {
    const double lo = k_center - 5.0 * k_sigma;
    const double hi = k_center + 5.0 * k_sigma;
    if (lo <= basis.wavenumber.front() || hi >= basis.wavenumber.back())
        throw std::invalid_argument(
            "photon spectral support (k0 +- 5 sigma_k) leaves the retained mode band");
}

void add_gaussian_component(const ModeBasis& basis, double k0, double sigma,
                            double r0, std::vector<Complex>& amp) {
    for (int i = 0; i < basis.mode_count(); ++i) {
        const double k = basis.wavenumber[i];
        const double dk = k - k0;
        const double mag = std::exp(-dk * dk / (4.0 * sigma * sigma));
        amp[i] += std::polar(mag, -k * r0);
    }
}

// Uniform double in [lo, hi) from the top 53 bits of the generator output.
// Kept independent of std::uniform_real_distribution so that states are
// reproducible across standard library implementations.
double draw_uniform(std::mt19937_64& gen, double lo, double hi) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

}  // namespace

SingleExcitationState gaussian_photon_state(const ModeBasis& basis,
                                            const GaussianPhotonSpec& spec,
                                            int n_atoms) {
    if (!(spec.k_sigma > 0.0))
        throw std::invalid_argument("gaussian_photon_state: k_sigma must be positive");
    check_in_band(basis, spec.k_center, spec.k_sigma);
    SingleExcitationState state;
    state.mode_amp.assign(basis.mode_count(), Complex{0.0, 0.0});
    state.atom_amp.assign(n_atoms, Complex{0.0, 0.0});
    add_gaussian_component(basis, spec.k_center, spec.k_sigma,
                           spec.center_position, state.mode_amp);
    return normalize(std::move(state));
}

std::vector<DrawnGaussian> draw_multi_gaussian_params(int n_components,
                                                      std::uint64_t seed,
                                                      double k_center,
                                                      const MultiGaussianBounds& bounds) {
    if (n_components < 1)
        throw std::invalid_argument("random_multi_gaussian_state: need n_components >= 1");
    if (!(bounds.sigma_min > 0.0) || bounds.sigma_max < bounds.sigma_min)
        throw std::invalid_argument("random_multi_gaussian_state: bad sigma bounds");
    if (!(bounds.r_min < bounds.r_max))
        throw std::invalid_argument("random_multi_gaussian_state: bad r bounds");
    std::mt19937_64 gen(seed);
    std::vector<DrawnGaussian> params;
    params.reserve(n_components);
    for (int i = 0; i < n_components; ++i) {
        DrawnGaussian g{};
        g.k_center = draw_uniform(gen, k_center - bounds.k_halfwidth,
                                  k_center + bounds.k_halfwidth);
        g.k_sigma = draw_uniform(gen, bounds.sigma_min, bounds.sigma_max);
        g.center_position = draw_uniform(gen, bounds.r_min, bounds.r_max);
        params.push_back(g);
    }
    return params;
}

SingleExcitationState random_multi_gaussian_state(const ModeBasis& basis,
                                                  int n_components,
                                                  std::uint64_t seed,
                                                  double k_center,
                                                  const MultiGaussianBounds& bounds,
                                                  int n_atoms) {
    // Validate the bounds, not the draws: every admissible draw must stay
    // in-band, every center in the left half so the packet has room to run.
    check_in_band(basis, k_center - bounds.k_halfwidth, bounds.sigma_max);
    check_in_band(basis, k_center + bounds.k_halfwidth, bounds.sigma_max);
    if (!(bounds.r_min > 0.0) || !(bounds.r_max <= 0.5 * basis.length))
        throw std::invalid_argument(
            "random_multi_gaussian_state: component centers must lie in (0, L/2]");

    const auto params =
        draw_multi_gaussian_params(n_components, seed, k_center, bounds);
    SingleExcitationState state;
    state.mode_amp.assign(basis.mode_count(), Complex{0.0, 0.0});
    state.atom_amp.assign(n_atoms, Complex{0.0, 0.0});
    for (const auto& g : params)
        add_gaussian_component(basis, g.k_center, g.k_sigma, g.center_position,
                               state.mode_amp);
    return normalize(std::move(state));
}

SingleExcitationState normalize(SingleExcitationState state) {
    const double n = state.norm();
    if (!(n > 0.0))
        throw std::invalid_argument("normalize: state has zero norm");
    const double inv = 1.0 / n;
    for (auto& c : state.mode_amp) c *= inv;
    for (auto& c : state.atom_amp) c *= inv;
    return state;
}

}  // namespace cavityspec
