#include "cavityspec/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <lapacke.h>

namespace cavityspec {

double dipole_from_gamma(double gamma, double omega0) {
    if (!(omega0 > 0.0))
        throw std::invalid_argument("dipole_from_gamma: omega0 must be positive");
    if (gamma < 0.0)
        throw std::invalid_argument("dipole_from_gamma: gamma must be non-negative");
    return std::sqrt(gamma / omega0);
}

double radiative_level_shift(const ModeBasis& basis, double omega_bare,
                             double gamma) {
    const double lo = basis.frequency.front();
    const double hi = basis.frequency.back();
    if (!(omega_bare > lo && omega_bare < hi))
        throw std::invalid_argument(
            "radiative_level_shift: frequency outside the retained band");
    return gamma / (2.0 * kPi * omega_bare) *
           (omega_bare * std::log((omega_bare - lo) / (hi - omega_bare)) -
            (hi - lo));
}

double bare_frequency_for_resonance(const ModeBasis& basis, double omega_dressed,
                                    double gamma) {
    double bare = omega_dressed;
    for (int iter = 0; iter < 50; ++iter) {
        const double next = omega_dressed - radiative_level_shift(basis, bare, gamma);
        if (std::abs(next - bare) < 1e-12 * omega_dressed) return next;
        bare = next;
    }
    return bare;
}

Eigen::MatrixXd CoupledHamiltonian::to_dense() const {
    const int d = dimension();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
    h.diagonal() = diagonal;
    if (n_atoms > 0) {
        h.block(n_modes, 0, n_atoms, n_modes) = coupling;
        h.block(0, n_modes, n_modes, n_atoms) = coupling.transpose();
    }
    return h;
}

void CoupledHamiltonian::apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
    const int d = dimension();
    y.resize(d);
    for (int i = 0; i < d; ++i) y[i] = diagonal[i] * x[i];
    if (n_atoms == 0) return;
    const Eigen::VectorXd xr = x.real();
    const Eigen::VectorXd xi = x.imag();
    const Eigen::VectorXd ar = coupling * xr.head(n_modes);
    const Eigen::VectorXd ai = coupling * xi.head(n_modes);
    const Eigen::VectorXd mr = coupling.transpose() * xr.tail(n_atoms);
    const Eigen::VectorXd mi = coupling.transpose() * xi.tail(n_atoms);
    for (int j = 0; j < n_atoms; ++j) y[n_modes + j] += Complex(ar[j], ai[j]);
    for (int n = 0; n < n_modes; ++n) y[n] += Complex(mr[n], mi[n]);
}

namespace {

Eigen::VectorXcd pack_state(const SingleExcitationState& state) {
    Eigen::VectorXcd psi(state.mode_amp.size() + state.atom_amp.size());
    for (std::size_t n = 0; n < state.mode_amp.size(); ++n) psi[n] = state.mode_amp[n];
    for (std::size_t j = 0; j < state.atom_amp.size(); ++j)
        psi[state.mode_amp.size() + j] = state.atom_amp[j];
    return psi;
}

SingleExcitationState unpack_state(const Eigen::VectorXcd& psi, int n_modes,
                                   int n_atoms, double t) {
    SingleExcitationState state;
    state.mode_amp.assign(psi.data(), psi.data() + n_modes);
    state.atom_amp.assign(psi.data() + n_modes, psi.data() + n_modes + n_atoms);
    state.time = t;
    return state;
}

}  // namespace

double CoupledHamiltonian::expectation(const SingleExcitationState& state) const {
    const Eigen::VectorXcd x = pack_state(state);
    Eigen::VectorXcd y;
    apply(x, y);
    return x.dot(y).real();
}

CoupledHamiltonian assemble_hamiltonian(const ModeBasis& basis,
                                        const std::vector<AtomSpec>& atoms,
                                        double t) {
    const int nm = basis.mode_count();
    const int na = static_cast<int>(atoms.size());
    CoupledHamiltonian h;
    h.n_modes = nm;
    h.n_atoms = na;
    h.diagonal.resize(nm + na);
    for (int n = 0; n < nm; ++n) h.diagonal[n] = basis.frequency[n];
    h.coupling = Eigen::MatrixXd::Zero(na, nm);
    h.valid_from = -std::numeric_limits<double>::infinity();
    h.valid_until = std::numeric_limits<double>::infinity();
    for (int j = 0; j < na; ++j) {
        const AtomSpec& atom = atoms[j];
        if (!(atom.position > 0.0 && atom.position < basis.length))
            throw std::invalid_argument("assemble_hamiltonian: atom outside cavity");
        h.diagonal[nm + j] = atom.frequency;
        for (const auto& w : atom.schedule) {
            if (w.t_on <= t && w.t_on > h.valid_from) h.valid_from = w.t_on;
            if (w.t_off <= t && w.t_off > h.valid_from) h.valid_from = w.t_off;
            if (w.t_on > t && w.t_on < h.valid_until) h.valid_until = w.t_on;
            if (w.t_off > t && w.t_off < h.valid_until) h.valid_until = w.t_off;
        }
        if (!atom.active_at(t) || atom.dipole == 0.0) continue;
        for (int n = 0; n < nm; ++n) {
            h.coupling(j, n) = -std::sqrt(basis.frequency[n] / basis.length) *
                               std::sin(basis.wavenumber[n] * atom.position) *
                               atom.dipole;
        }
    }
    return h;
}

Schedule make_schedule(const std::vector<AtomSpec>& atoms,
                       std::vector<double> sample_times, double t0, double t_end) {
    Schedule schedule;
    for (const auto& atom : atoms) {
        for (const auto& w : atom.schedule) {
            for (double edge : {w.t_on, w.t_off}) {
                if (std::isfinite(edge) && edge > t0 && edge < t_end)
                    schedule.event_times.push_back(edge);
            }
        }
    }
    std::sort(schedule.event_times.begin(), schedule.event_times.end());
    schedule.event_times.erase(
        std::unique(schedule.event_times.begin(), schedule.event_times.end()),
        schedule.event_times.end());

    std::sort(sample_times.begin(), sample_times.end());
    for (double t : sample_times) {
        if (t < t0 || t > t_end)
            throw std::invalid_argument("make_schedule: sample time outside [t0, t_end]");
    }
    schedule.sample_times = std::move(sample_times);
    return schedule;
}

double atom_excitation(const SingleExcitationState& state, int atom_index) {
    if (atom_index < 0 || atom_index >= static_cast<int>(state.atom_amp.size()))
        throw std::out_of_range("atom_excitation: atom index out of range");
    return std::norm(state.atom_amp[atom_index]);
}

// ---------------------------------------------------------------------------
// Propagation internals

namespace {

struct OutputSet {
    // (time, slot) pairs for full states and for traces, both sorted by time.
    std::vector<std::pair<double, int>> states;
    std::vector<std::pair<double, int>> traces;
};

void check_truncation(const ModeBasis& basis, const std::vector<AtomSpec>& atoms,
                      std::vector<std::string>& warnings) {
    const double lo = basis.frequency.front();
    const double hi = basis.frequency.back();
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        const AtomSpec& a = atoms[j];
        if (a.dipole == 0.0) continue;
        if (a.frequency - 10.0 * a.decay_rate < lo ||
            a.frequency + 10.0 * a.decay_rate > hi) {
            std::ostringstream msg;
            msg << "atom " << j << " linewidth band (omega0 +- 10 Gamma = "
                << a.frequency - 10.0 * a.decay_rate << " .. "
                << a.frequency + 10.0 * a.decay_rate
                << ") extends outside the retained mode band [" << lo << ", " << hi
                << "]; truncation may distort its decay";
            warnings.push_back(msg.str());
        }
    }
}

// Exact propagator: H = V diag(w) V^T per interval, psi(t) = V e^{-i w dt} V^T psi.
class EigenPropagator {
public:
    EigenPropagator(const ModeBasis& basis, const std::vector<AtomSpec>& atoms,
                    double t_start)
        : basis_(basis), atoms_(atoms) {
        rebuild(t_start);
    }

    void rebuild(double t) {
        CoupledHamiltonian h = assemble_hamiltonian(basis_, atoms_, t);
        const int d = h.dimension();
        vectors_ = h.to_dense();
        values_.resize(d);
        const int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', d,
                                        vectors_.data(), d, values_.data());
        if (info != 0)
            throw std::runtime_error("eigendecomposition failed (dsyevd info=" +
                                     std::to_string(info) + ")");
        interval_start_ = t;
    }

    // Enter the interval that starts at `t` with the state psi(t).
    void set_state(const Eigen::VectorXcd& psi) {
        coeff_re_ = vectors_.transpose() * psi.real();
        coeff_im_ = vectors_.transpose() * psi.imag();
    }

    Eigen::VectorXcd state_at(double t) const {
        const int d = static_cast<int>(values_.size());
        Eigen::VectorXd pr(d), pi(d);
        phased(t, pr, pi);
        const Eigen::VectorXd yr = vectors_ * pr;
        const Eigen::VectorXd yi = vectors_ * pi;
        Eigen::VectorXcd out(d);
        for (int i = 0; i < d; ++i) out[i] = Complex(yr[i], yi[i]);
        return out;
    }

    // Populations of several packed components at one time.
    void populations_at(double t, const std::vector<int>& rows,
                        std::vector<double>& out) const {
        const int d = static_cast<int>(values_.size());
        Eigen::VectorXd pr(d), pi(d);
        phased(t, pr, pi);
        out.resize(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const double re = vectors_.row(rows[k]).dot(pr);
            const double im = vectors_.row(rows[k]).dot(pi);
            out[k] = re * re + im * im;
        }
    }

private:
    void phased(double t, Eigen::VectorXd& pr, Eigen::VectorXd& pi) const {
        const double dt = t - interval_start_;
        const int d = static_cast<int>(values_.size());
        for (int i = 0; i < d; ++i) {
            const double c = std::cos(values_[i] * dt);
            const double s = std::sin(values_[i] * dt);
            // (re + i im) * e^{-i w dt}
            pr[i] = coeff_re_[i] * c + coeff_im_[i] * s;
            pi[i] = coeff_im_[i] * c - coeff_re_[i] * s;
        }
    }

    const ModeBasis& basis_;
    const std::vector<AtomSpec>& atoms_;
    Eigen::MatrixXd vectors_;
    std::vector<double> values_;
    Eigen::VectorXd coeff_re_, coeff_im_;
    double interval_start_ = 0.0;
};

void rk4_step(const CoupledHamiltonian& h, Eigen::VectorXcd& y, double dt,
              Eigen::VectorXcd& k1, Eigen::VectorXcd& k2, Eigen::VectorXcd& k3,
              Eigen::VectorXcd& k4, Eigen::VectorXcd& tmp) {
    const Complex mi(0.0, -1.0);
    h.apply(y, k1);
    k1 *= mi;
    tmp = y + (0.5 * dt) * k1;
    h.apply(tmp, k2);
    k2 *= mi;
    tmp = y + (0.5 * dt) * k2;
    h.apply(tmp, k3);
    k3 *= mi;
    tmp = y + dt * k3;
    h.apply(tmp, k4);
    k4 *= mi;
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct DriftTracker {
    double t0 = 0.0;
    double norm0 = 0.0;
    double norm_rate = 0.0;
    double energy_rel = 0.0;
    double interval_energy = 0.0;

    void start(double t, double norm_sq) { t0 = t; norm0 = norm_sq; }
    void observe_norm(double t, double norm_sq) {
        if (t > t0 + 1e-12)
            norm_rate = std::max(norm_rate, std::abs(norm_sq - norm0) / (t - t0));
    }
    void start_interval(double energy) { interval_energy = energy; }
    void observe_energy(double energy) {
        const double scale = std::max(std::abs(interval_energy), 1e-30);
        energy_rel = std::max(energy_rel, std::abs(energy - interval_energy) / scale);
    }
};

}  // namespace

Trajectory evolve(const SingleExcitationState& initial, const ModeBasis& basis,
                  const std::vector<AtomSpec>& atoms, const Schedule& schedule,
                  double t_end, const EvolveOptions& options) {
    const int nm = basis.mode_count();
    const int na = static_cast<int>(atoms.size());
    if (static_cast<int>(initial.mode_amp.size()) != nm)
        throw std::invalid_argument("evolve: state/basis mode count mismatch");
    if (static_cast<int>(initial.atom_amp.size()) != na)
        throw std::invalid_argument("evolve: state/atom count mismatch");
    if (t_end < initial.time)
        throw std::invalid_argument("evolve: t_end precedes state time");
    for (int j : options.traced_atoms)
        if (j < 0 || j >= na) throw std::out_of_range("evolve: traced atom index");

    const double t0 = initial.time;
    Trajectory result;
    result.samples.resize(schedule.sample_times.size());
    result.traces.assign(options.traced_atoms.size(),
                         std::vector<double>(options.trace_times.size(), 0.0));
    check_truncation(basis, atoms, result.warnings);

    // Interval boundaries: t0, interior events, t_end.
    std::vector<double> edges{t0};
    for (double e : schedule.event_times)
        if (e > t0 && e < t_end) edges.push_back(e);
    edges.push_back(t_end);

    // Requested outputs sorted by time; boundary hits go to the earlier
    // interval (the state is continuous across activation switches).
    OutputSet outputs;
    for (std::size_t i = 0; i < schedule.sample_times.size(); ++i)
        outputs.states.emplace_back(schedule.sample_times[i], static_cast<int>(i));
    for (std::size_t i = 0; i < options.trace_times.size(); ++i) {
        const double t = options.trace_times[i];
        if (t < t0 || t > t_end)
            throw std::invalid_argument("evolve: trace time outside [t0, t_end]");
        outputs.traces.emplace_back(t, static_cast<int>(i));
    }
    std::sort(outputs.states.begin(), outputs.states.end());
    std::sort(outputs.traces.begin(), outputs.traces.end());

    std::vector<int> trace_rows;
    for (int j : options.traced_atoms) trace_rows.push_back(nm + j);

    Eigen::VectorXcd psi = pack_state(initial);
    DriftTracker drift;
    drift.start(t0, psi.squaredNorm());

    std::size_t si = 0, ti = 0;
    auto store_state = [&](const Eigen::VectorXcd& v, double t, int slot) {
        result.samples[slot] = unpack_state(v, nm, na, t);
    };

    if (options.backend == PropagatorBackend::Eigendecomposition) {
        EigenPropagator prop(basis, atoms, t0);
        for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
            const double a = edges[k];
            const double b = edges[k + 1];
            if (k > 0) prop.rebuild(a);
            prop.set_state(psi);
            {
                CoupledHamiltonian h = assemble_hamiltonian(basis, atoms, a);
                drift.start_interval(h.expectation(unpack_state(psi, nm, na, a)));
            }
            while (si < outputs.states.size() && outputs.states[si].first <= b) {
                const auto [t, slot] = outputs.states[si++];
                store_state(prop.state_at(t), t, slot);
            }
            std::vector<double> pops;
            while (ti < outputs.traces.size() && outputs.traces[ti].first <= b) {
                const auto [t, slot] = outputs.traces[ti++];
                prop.populations_at(t, trace_rows, pops);
                for (std::size_t m = 0; m < pops.size(); ++m)
                    result.traces[m][slot] = pops[m];
            }
            psi = prop.state_at(b);
            drift.observe_norm(b, psi.squaredNorm());
            {
                CoupledHamiltonian h = assemble_hamiltonian(basis, atoms, a);
                drift.observe_energy(h.expectation(unpack_state(psi, nm, na, b)));
            }
        }
    } else {
        const double omega_max = basis.max_frequency();
        const double h_max =
            options.max_step > 0.0 ? options.max_step : 0.02 / omega_max;

        // March through the union of interval edges and output times.
        std::vector<double> checkpoints = edges;
        for (const auto& [t, slot] : outputs.states) checkpoints.push_back(t);
        for (const auto& [t, slot] : outputs.traces) checkpoints.push_back(t);
        std::sort(checkpoints.begin(), checkpoints.end());
        checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()),
                          checkpoints.end());

        CoupledHamiltonian h = assemble_hamiltonian(basis, atoms, t0);
        drift.start_interval(h.expectation(unpack_state(psi, nm, na, t0)));
        // Outputs requested exactly at the start come from the initial state.
        while (si < outputs.states.size() && outputs.states[si].first <= t0) {
            const auto [t, slot] = outputs.states[si++];
            store_state(psi, t0, slot);
        }
        while (ti < outputs.traces.size() && outputs.traces[ti].first <= t0) {
            const auto [t, slot] = outputs.traces[ti++];
            for (std::size_t m = 0; m < trace_rows.size(); ++m)
                result.traces[m][slot] = std::norm(psi[trace_rows[m]]);
        }
        Eigen::VectorXcd k1, k2, k3, k4, tmp;
        std::size_t edge_next = 1;  // edges[0] == t0
        for (std::size_t c = 0; c + 1 < checkpoints.size(); ++c) {
            const double a = checkpoints[c];
            const double b = checkpoints[c + 1];
            const int nsteps = std::max(1, static_cast<int>(std::ceil((b - a) / h_max)));
            const double dt = (b - a) / nsteps;
            for (int s = 0; s < nsteps; ++s) rk4_step(h, psi, dt, k1, k2, k3, k4, tmp);
            drift.observe_norm(b, psi.squaredNorm());
            drift.observe_energy(h.expectation(unpack_state(psi, nm, na, b)));
            while (si < outputs.states.size() && outputs.states[si].first <= b) {
                const auto [t, slot] = outputs.states[si++];
                store_state(psi, b, slot);
            }
            while (ti < outputs.traces.size() && outputs.traces[ti].first <= b) {
                const auto [t, slot] = outputs.traces[ti++];
                for (std::size_t m = 0; m < trace_rows.size(); ++m)
                    result.traces[m][slot] = std::norm(psi[trace_rows[m]]);
            }
            if (edge_next < edges.size() && b == edges[edge_next]) {
                h = assemble_hamiltonian(basis, atoms, b);
                drift.start_interval(h.expectation(unpack_state(psi, nm, na, b)));
                ++edge_next;
            }
        }

        if (options.verify_convergence) {
            EvolveOptions halved = options;
            halved.verify_convergence = false;
            halved.max_step = 0.5 * h_max;
            Trajectory fine = evolve(initial, basis, atoms, schedule, t_end, halved);
            double max_diff = 0.0;
            for (std::size_t i = 0; i < result.samples.size(); ++i) {
                const auto& coarse = result.samples[i];
                const auto& ref = fine.samples[i];
                for (std::size_t n = 0; n < coarse.mode_amp.size(); ++n)
                    max_diff = std::max(max_diff,
                                        std::abs(coarse.mode_amp[n] - ref.mode_amp[n]));
                for (std::size_t j = 0; j < coarse.atom_amp.size(); ++j)
                    max_diff = std::max(max_diff,
                                        std::abs(coarse.atom_amp[j] - ref.atom_amp[j]));
            }
            if (max_diff > options.tolerance) {
                std::ostringstream msg;
                msg << "evolve: step-halving check failed, amplitudes moved by "
                    << max_diff << " (> tolerance " << options.tolerance
                    << ") at max_step " << h_max;
                throw StepSizeFailure(msg.str());
            }
            fine.warnings = std::move(result.warnings);
            return fine;
        }
    }

    // Outputs that landed exactly on t_end (or an empty horizon).
    while (si < outputs.states.size()) {
        const auto [t, slot] = outputs.states[si++];
        store_state(psi, t_end, slot);
    }
    while (ti < outputs.traces.size()) {
        const auto [t, slot] = outputs.traces[ti++];
        for (std::size_t m = 0; m < trace_rows.size(); ++m)
            result.traces[m][slot] = std::norm(psi[trace_rows[m]]);
    }

    result.norm_drift_rate = drift.norm_rate;
    result.energy_rel_drift = drift.energy_rel;
    return result;
}

}  // namespace cavityspec
