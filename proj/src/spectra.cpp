#include "cavityspec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cavityspec/dynamics.hpp"

namespace cavityspec {

double SpatialFilter::operator()(double r) const {
    switch (kind) {
        case Kind::Unit:
            return 1.0;
        case Kind::Gaussian: {
            const double z = (r - center) / sigma;
            return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi * sigma * sigma);
        }
        case Kind::Boxcar:
            return (r >= r_min && r <= r_max) ? 1.0 : 0.0;
    }
    return 0.0;
}

std::string SpatialFilter::describe() const {
    std::ostringstream out;
    switch (kind) {
        case Kind::Unit:
            out << "unit";
            break;
        case Kind::Gaussian:
            out << "gaussian(center=" << center << ", sigma=" << sigma << ")";
            break;
        case Kind::Boxcar:
            out << "boxcar(" << r_min << ", " << r_max << ")";
            break;
    }
    return out.str();
}

SpatialFilter SpatialFilter::unit() { return SpatialFilter{}; }

SpatialFilter SpatialFilter::gaussian(double center, double sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("gaussian filter: sigma must be positive");
    SpatialFilter f;
    f.kind = Kind::Gaussian;
    f.center = center;
    f.sigma = sigma;
    return f;
}

SpatialFilter SpatialFilter::boxcar(double r_min, double r_max) {
    if (!(r_min >= 0.0 && r_min < r_max))
        throw std::invalid_argument("boxcar filter: need 0 <= r_min < r_max");
    SpatialFilter f;
    f.kind = Kind::Boxcar;
    f.r_min = r_min;
    f.r_max = r_max;
    return f;
}

CorrelationField apply_filter(const CorrelationField& field,
                              const SpatialFilter& filter) {
    CorrelationField out;
    out.grid = field.grid;
    out.time = field.time;
    Eigen::VectorXd g(field.grid.count);
    for (int i = 0; i < field.grid.count; ++i) g[i] = filter(field.grid.point(i));
    out.values = g.asDiagonal() * field.values * g.asDiagonal();
    return out;
}

std::vector<double> AnalyzerBank::comb() const {
    std::vector<double> omega(n_atoms);
    const double d = comb_spacing();
    for (int n = 0; n < n_atoms; ++n) omega[n] = omega_min + n * d;
    return omega;
}

void validate_bank(const AnalyzerBank& bank, double cavity_length) {
    if (bank.n_atoms < 2)
        throw std::invalid_argument("analyzer bank '" + bank.label +
                                    "': need at least 2 atoms");
    if (!(bank.omega_min > 0.0 && bank.omega_min < bank.omega_max))
        throw std::invalid_argument("analyzer bank '" + bank.label +
                                    "': need 0 < omega_min < omega_max");
    if (!(bank.position > 0.0 && bank.position < cavity_length))
        throw std::invalid_argument("analyzer bank '" + bank.label +
                                    "': position outside the cavity");
    if (!(bank.decay_rate > 0.0))
        throw std::invalid_argument("analyzer bank '" + bank.label +
                                    "': decay_rate must be positive");
    if (bank.decay_rate > bank.comb_spacing() / 10.0)
        throw std::invalid_argument(
            "analyzer bank '" + bank.label +
            "': decay_rate exceeds comb_spacing/10, the comb cannot resolve itself");
    if (!(bank.t_on < bank.t_read))
        throw std::invalid_argument("analyzer bank '" + bank.label +
                                    "': need t_on < t_read");
}

std::vector<AtomSpec> build_analyzer_bank(const AnalyzerBank& bank) {
    std::vector<AtomSpec> atoms;
    atoms.reserve(bank.n_atoms);
    for (double omega : bank.comb()) {
        AtomSpec atom;
        atom.position = bank.position;
        atom.frequency = omega;
        atom.decay_rate = bank.decay_rate;
        atom.dipole = dipole_from_gamma(bank.decay_rate, omega);
        atom.schedule = {ActivationWindow{bank.t_on,
                                          std::numeric_limits<double>::infinity()}};
        atom.role = AtomRole::Analyzer;
        atoms.push_back(atom);
    }
    return atoms;
}

std::string to_string(SpectrumProvenance p) {
    switch (p) {
        case SpectrumProvenance::Analyzer: return "analyzer";
        case SpectrumProvenance::ModeReconstruction: return "mode-reconstruction";
        case SpectrumProvenance::InitialState: return "initial-state";
    }
    return "?";
}

Spectrum filtered_mode_spectrum(const SingleExcitationState& state,
                                const ModeBasis& basis,
                                const SpatialFilter& filter,
                                const SpatialGrid& grid) {
    validate_grid(grid, basis);
    // Separable path: W_F integrates to conj(I_ref) I_p with
    // I_p = integral sin(k_p r) g(r) T(r) dr, so |c_p|^2 = 4 |I_p|^2 / (L omega_p).
    Eigen::VectorXcd windowed = sample_T(state, basis, grid);
    for (int i = 0; i < grid.count; ++i) windowed[i] *= filter(grid.point(i));
    const Eigen::VectorXcd integrals = project_onto_modes(windowed, basis, grid);

    Spectrum s;
    s.provenance = SpectrumProvenance::ModeReconstruction;
    s.label = filter.describe();
    s.frequency = basis.frequency;
    s.intensity.resize(basis.mode_count());
    double peak = 0.0;
    for (int p = 0; p < basis.mode_count(); ++p) {
        s.intensity[p] =
            4.0 * std::norm(integrals[p]) / (basis.length * basis.frequency[p]);
        peak = std::max(peak, s.intensity[p]);
    }
    if (!(peak > 0.0))
        throw DegenerateFieldError(
            "filtered_mode_spectrum: filtered field is numerically zero");
    return s;
}

Spectrum analyzer_spectrum(const SingleExcitationState& state,
                           const AnalyzerBank& bank, int first_atom_index) {
    if (state.time < bank.t_read)
        throw std::invalid_argument("analyzer_spectrum: bank '" + bank.label +
                                    "' read at t=" + std::to_string(state.time) +
                                    " before its readout time");
    if (first_atom_index < 0 ||
        first_atom_index + bank.n_atoms > static_cast<int>(state.atom_amp.size()))
        throw std::out_of_range("analyzer_spectrum: bank atoms outside the state");
    Spectrum s;
    s.provenance = SpectrumProvenance::Analyzer;
    s.label = bank.label;
    s.frequency = bank.comb();
    s.intensity.resize(bank.n_atoms);
    for (int n = 0; n < bank.n_atoms; ++n)
        s.intensity[n] = std::norm(state.atom_amp[first_atom_index + n]);
    return s;
}

namespace {

double trapezoid_area(const std::vector<double>& x, const std::vector<double>& y) {
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        area += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
    return area;
}

}  // namespace

Spectrum normalize_spectrum(Spectrum s) {
    if (s.frequency.size() != s.intensity.size() || s.frequency.size() < 2)
        throw std::invalid_argument("normalize_spectrum: malformed spectrum");
    const double area = trapezoid_area(s.frequency, s.intensity);
    if (!(area > 0.0))
        throw DegenerateSpectrumError(
            "normalize_spectrum: spectrum has zero area (no signal)");
    if (!s.normalized) s.raw_area = area;
    for (double& v : s.intensity) v /= area;
    s.normalized = true;
    return s;
}

double intensity_at(const Spectrum& s, double omega) {
    if (s.frequency.empty()) return 0.0;
    if (omega <= s.frequency.front()) return omega == s.frequency.front() ? s.intensity.front() : 0.0;
    if (omega >= s.frequency.back()) return omega == s.frequency.back() ? s.intensity.back() : 0.0;
    const auto it = std::upper_bound(s.frequency.begin(), s.frequency.end(), omega);
    const std::size_t hi = static_cast<std::size_t>(it - s.frequency.begin());
    const std::size_t lo = hi - 1;
    const double f =
        (omega - s.frequency[lo]) / (s.frequency[hi] - s.frequency[lo]);
    return (1.0 - f) * s.intensity[lo] + f * s.intensity[hi];
}

SpectrumComparison compare_spectra(const Spectrum& a, const Spectrum& b) {
    if (a.frequency.size() < 2 || b.frequency.size() < 2)
        throw std::invalid_argument("compare_spectra: spectra need >= 2 samples");
    const double lo = std::max(a.frequency.front(), b.frequency.front());
    const double hi = std::min(a.frequency.back(), b.frequency.back());
    if (!(lo < hi))
        throw ComparisonError("compare_spectra: frequency supports are disjoint");

    // Common grid: every sample of either spectrum inside the overlap.
    std::vector<double> grid{lo, hi};
    for (double w : a.frequency)
        if (w > lo && w < hi) grid.push_back(w);
    for (double w : b.frequency)
        if (w > lo && w < hi) grid.push_back(w);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<double> ya(grid.size()), yb(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ya[i] = intensity_at(a, grid[i]);
        yb[i] = intensity_at(b, grid[i]);
    }
    const double area_a = trapezoid_area(grid, ya);
    const double area_b = trapezoid_area(grid, yb);
    if (!(area_a > 0.0) || !(area_b > 0.0))
        throw DegenerateSpectrumError("compare_spectra: no signal on common support");
    for (double& v : ya) v /= area_a;
    for (double& v : yb) v /= area_b;

    SpectrumComparison cmp;
    std::vector<double> diff(grid.size());
    std::size_t imax_a = 0, imax_b = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        diff[i] = std::abs(ya[i] - yb[i]);
        cmp.linf = std::max(cmp.linf, diff[i]);
        if (ya[i] > ya[imax_a]) imax_a = i;
        if (yb[i] > yb[imax_b]) imax_b = i;
    }
    cmp.l1 = trapezoid_area(grid, diff);
    cmp.peak_shift = std::abs(grid[imax_a] - grid[imax_b]);
    return cmp;
}

namespace {

// Prominence of the extremum at index i in `y` (maxima for sign = +1,
// minima handled by negating): height above the higher of the two key
// saddles toward the nearest strictly higher extremum (or data edge).
double prominence_at(const std::vector<double>& y, std::size_t i) {
    double left_min = y[i], right_min = y[i];
    for (std::size_t j = i; j-- > 0;) {
        if (y[j] > y[i]) break;
        left_min = std::min(left_min, y[j]);
    }
    for (std::size_t j = i + 1; j < y.size(); ++j) {
        if (y[j] > y[i]) break;
        right_min = std::min(right_min, y[j]);
    }
    return y[i] - std::max(left_min, right_min);
}

std::vector<std::size_t> interior_maxima(const std::vector<double>& y) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        if (y[i] > y[i - 1] && y[i] >= y[i + 1]) idx.push_back(i);
    return idx;
}

}  // namespace

std::vector<SpectralFeature> find_spectral_peaks(const Spectrum& s,
                                                 double min_height_frac,
                                                 double min_prominence_frac) {
    std::vector<SpectralFeature> peaks;
    if (s.intensity.size() < 3) return peaks;
    const double top = *std::max_element(s.intensity.begin(), s.intensity.end());
    if (!(top > 0.0)) return peaks;
    for (std::size_t i : interior_maxima(s.intensity)) {
        const double prom = prominence_at(s.intensity, i);
        if (s.intensity[i] >= min_height_frac * top &&
            prom >= min_prominence_frac * top)
            peaks.push_back({s.frequency[i], s.intensity[i], prom});
    }
    return peaks;
}

std::vector<SpectralFeature> find_spectral_dips(const Spectrum& s,
                                                double min_prominence_frac) {
    std::vector<SpectralFeature> dips;
    if (s.intensity.size() < 3) return dips;
    const double top = *std::max_element(s.intensity.begin(), s.intensity.end());
    if (!(top > 0.0)) return dips;
    std::vector<double> inverted(s.intensity.size());
    for (std::size_t i = 0; i < s.intensity.size(); ++i) inverted[i] = -s.intensity[i];
    for (std::size_t i : interior_maxima(inverted)) {
        const double prom = prominence_at(inverted, i);
        if (prom >= min_prominence_frac * top)
            dips.push_back({s.frequency[i], s.intensity[i], prom});
    }
    return dips;
}

double peak_fwhm(const Spectrum& s, double near_frequency) {
    const auto peaks = find_spectral_peaks(s, 0.0, 0.0);
    if (peaks.empty())
        throw std::invalid_argument("peak_fwhm: spectrum has no interior peak");
    const auto nearest = std::min_element(
        peaks.begin(), peaks.end(), [&](const auto& p, const auto& q) {
            return std::abs(p.frequency - near_frequency) <
                   std::abs(q.frequency - near_frequency);
        });
    // Index of the peak sample.
    const auto it = std::lower_bound(s.frequency.begin(), s.frequency.end(),
                                     nearest->frequency);
    std::size_t ip = static_cast<std::size_t>(it - s.frequency.begin());
    const double half = 0.5 * nearest->intensity;

    double left = s.frequency.front();
    for (std::size_t j = ip; j-- > 0;) {
        if (s.intensity[j] <= half) {
            const double f = (half - s.intensity[j]) /
                             (s.intensity[j + 1] - s.intensity[j]);
            left = s.frequency[j] + f * (s.frequency[j + 1] - s.frequency[j]);
            break;
        }
    }
    double right = s.frequency.back();
    for (std::size_t j = ip + 1; j < s.frequency.size(); ++j) {
        if (s.intensity[j] <= half) {
            const double f = (s.intensity[j - 1] - half) /
                             (s.intensity[j - 1] - s.intensity[j]);
            right = s.frequency[j - 1] + f * (s.frequency[j] - s.frequency[j - 1]);
            break;
        }
    }
    return right - left;
}

}  // namespace cavityspec
