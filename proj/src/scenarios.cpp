#include "cavityspec/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cavityspec {

using nlohmann::json;

AtomSpec make_scatterer(double position, double frequency, double decay_rate,
                        std::vector<ActivationWindow> schedule) {
    AtomSpec atom;
    atom.position = position;
    atom.frequency = frequency;
    atom.decay_rate = decay_rate;
    atom.dipole = dipole_from_gamma(decay_rate, frequency);
    atom.schedule = std::move(schedule);
    atom.role = AtomRole::Scatterer;
    return atom;
}

// ---------------------------------------------------------------------------
// Built-in scenarios

namespace {

constexpr int kBankAtoms = 200;
constexpr double kBankOmegaMin = 80.0;
constexpr double kBankOmegaMax = 120.0;

// gamma_a = comb_spacing/400 keeps the bank's total absorption well under
// 1% of the field energy (the banks must read the spectrum without
// reshaping the radiation they measure) while the excitations stay many
// orders of magnitude above the numerical floor.
AnalyzerBank make_bank(const std::string& label, double position, double t_on,
                       double t_read) {
    AnalyzerBank bank;
    bank.label = label;
    bank.n_atoms = kBankAtoms;
    bank.omega_min = kBankOmegaMin;
    bank.omega_max = kBankOmegaMax;
    bank.position = position;
    bank.decay_rate = bank.comb_spacing() / 400.0;
    bank.t_on = t_on;
    bank.t_read = t_read;
    return bank;
}

SpectrumRequest bank_spectrum(const std::string& name, const std::string& bank,
                              double time) {
    SpectrumRequest r;
    r.name = name;
    r.bank = bank;
    r.time = time;
    return r;
}

SpectrumRequest filter_spectrum(const std::string& name, SpatialFilter filter,
                                double time) {
    SpectrumRequest r;
    r.name = name;
    r.filter = filter;
    r.time = time;
    return r;
}

}  // namespace

ExperimentSpec scenario_one_atom() {
    ExperimentSpec spec;
    spec.name = "one_atom";
    spec.cavity_length = 2.0 * kPi;
    spec.n_modes = 400;

    GaussianPhotonSpec photon;
    photon.k_center = 100.0;
    photon.k_sigma = 2.0 * kPi;
    photon.center_position = 2.0;
    spec.initial_state = photon;

    const double center = spec.cavity_length / 2.0;  // = pi
    // Bare splitting renormalized so the dressed resonance sits exactly on
    // the photon's central frequency.
    const ModeBasis basis = build_mode_basis(spec.cavity_length, spec.n_modes);
    spec.scatterers = {
        make_scatterer(center, bare_frequency_for_resonance(basis, 100.0, kPi), kPi)};

    // The transmitted peak clears the right-hand banks (at center + 1) three
    // pulse widths after its center passes; the second right bank switches
    // on exactly then to see only the re-emitted radiation.
    const double sigma_x = 1.0 / (2.0 * photon.k_sigma);
    const double r_right = center + 1.0;
    const double t_peak1_passed = (r_right - photon.center_position) + 3.0 * sigma_x;
    // Readout at 4.2: late enough that the Gamma = pi decay tail has fully
    // crossed every bank (99.7% of the reflected energy is in by then),
    // early enough that no mirror reflection re-crosses a bank (the first
    // would reach one at t ~ 5.8).
    const double t_end = 4.2;

    spec.banks = {
        make_bank("left", 1.8, 1.5, t_end),
        make_bank("right_total", r_right, 0.0, t_peak1_passed),
        make_bank("right_peak2", r_right, t_peak1_passed, t_end),
    };

    spec.snapshot_times = {0.0, 3.8};
    spec.trace_dt = 0.005;
    spec.t_end = t_end;

    // Each analyzer readout is paired with the mode spectrum of the cavity
    // region holding the same radiation at the same instant.
    const double L = spec.cavity_length;
    spec.spectra = {
        filter_spectrum("initial_mode", SpatialFilter::unit(), 0.0),
        bank_spectrum("left_analyzer", "left", t_end),
        filter_spectrum("left_mode", SpatialFilter::boxcar(0.0, spec.banks[0].position),
                        t_end),
        bank_spectrum("right_total_analyzer", "right_total", t_end),
        filter_spectrum("right_total_mode", SpatialFilter::boxcar(r_right, L), t_end),
        bank_spectrum("right_peak1_analyzer", "right_total", t_peak1_passed),
        filter_spectrum("right_peak1_mode", SpatialFilter::boxcar(r_right, L),
                        t_peak1_passed),
        bank_spectrum("right_peak2_analyzer", "right_peak2", t_end),
        filter_spectrum(
            "right_peak2_mode",
            SpatialFilter::boxcar(r_right, r_right + (t_end - t_peak1_passed)),
            t_end),
    };
    spec.comparisons = {
        {"left", "left_analyzer", "left_mode", 0.05},
        {"right_total", "right_total_analyzer", "right_total_mode", 0.05},
        {"right_peak1", "right_peak1_analyzer", "right_peak1_mode", 0.05},
        {"right_peak2", "right_peak2_analyzer", "right_peak2_mode", 0.05},
    };
    return spec;
}

ExperimentSpec scenario_three_atoms() {
    ExperimentSpec spec;
    spec.name = "three_atoms";
    spec.cavity_length = 8.0 * kPi;
    spec.n_modes = 1600;

    GaussianPhotonSpec photon;
    photon.k_center = 100.0;
    photon.k_sigma = 4.0 * kPi;
    photon.center_position = spec.cavity_length / 4.0;
    spec.initial_state = photon;

    const double center = spec.cavity_length / 2.0;
    const ModeBasis basis = build_mode_basis(spec.cavity_length, spec.n_modes);
    spec.scatterers = {
        make_scatterer(center, bare_frequency_for_resonance(basis, 90.0, kPi), kPi),
        make_scatterer(center, bare_frequency_for_resonance(basis, 100.0, kPi), kPi),
        make_scatterer(center, bare_frequency_for_resonance(basis, 110.0, kPi / 4.0),
                       kPi / 4.0),
    };

    const double sigma_x = 1.0 / (2.0 * photon.k_sigma);
    const double r_right = center + 1.0;
    const double t_peak1_passed = (r_right - photon.center_position) + 3.0 * sigma_x;
    const double t_end = 17.0;

    // Left bank mirrors the right one; it wakes after the incoming photon
    // has passed it (t ~ 5.4) and before reflected radiation returns
    // (t ~ 7.2). The slow Gamma = pi/4 atom sets the long readout horizon.
    spec.banks = {
        make_bank("left", center - 1.0, 6.0, t_end),
        make_bank("right_total", r_right, 0.0, t_peak1_passed),
        make_bank("right_peak2", r_right, t_peak1_passed, t_end),
    };

    spec.snapshot_times = {0.0, 8.5, t_end};
    spec.trace_dt = 0.01;
    spec.t_end = t_end;

    const double L = spec.cavity_length;
    spec.spectra = {
        filter_spectrum("initial_mode", SpatialFilter::unit(), 0.0),
        bank_spectrum("left_analyzer", "left", t_end),
        filter_spectrum("left_mode", SpatialFilter::boxcar(0.0, spec.banks[0].position),
                        t_end),
        bank_spectrum("right_total_analyzer", "right_total", t_end),
        filter_spectrum("right_total_mode", SpatialFilter::boxcar(r_right, L), t_end),
        bank_spectrum("right_peak1_analyzer", "right_total", t_peak1_passed),
        filter_spectrum("right_peak1_mode", SpatialFilter::boxcar(r_right, L),
                        t_peak1_passed),
        bank_spectrum("right_peak2_analyzer", "right_peak2", t_end),
        filter_spectrum(
            "right_peak2_mode",
            SpatialFilter::boxcar(r_right, r_right + (t_end - t_peak1_passed)),
            t_end),
    };
    spec.comparisons = {
        {"left", "left_analyzer", "left_mode", 0.05},
        {"right_total", "right_total_analyzer", "right_total_mode", 0.05},
        {"right_peak1", "right_peak1_analyzer", "right_peak1_mode", 0.05},
        {"right_peak2", "right_peak2_analyzer", "right_peak2_mode", 0.05},
    };
    return spec;
}

ExperimentSpec scenario_random_photon(std::uint64_t seed) {
    ExperimentSpec spec;
    spec.name = "random_photon";
    spec.cavity_length = 8.0 * kPi;
    spec.n_modes = 1600;

    MultiGaussianSpec multi;
    multi.n_components = 10;
    multi.seed = seed;
    multi.k_center = 100.0;
    multi.bounds.k_halfwidth = 12.0;
    multi.bounds.sigma_min = 2.0 * kPi;
    multi.bounds.sigma_max = 4.0 * kPi;
    multi.bounds.r_min = kPi;            // left quarter of the cavity,
    multi.bounds.r_max = 2.0 * kPi;      // everything moving right
    spec.initial_state = multi;

    const double center = spec.cavity_length / 2.0;
    const ModeBasis basis = build_mode_basis(spec.cavity_length, spec.n_modes);
    spec.scatterers = {
        make_scatterer(center, bare_frequency_for_resonance(basis, 100.0, kPi), kPi)};

    // The component centers spread over [pi, 2pi], so the packet train is
    // up to ~pi long; the left bank sits 2.5 from the atom so the incoming
    // train finishes crossing it (t ~ 7.3) before reflections return
    // (t ~ 8.4).
    const double t_end = 16.0;
    spec.banks = {
        make_bank("left", center - 2.5, 7.8, t_end),
        make_bank("right", center + 1.0, 0.0, 14.0),
    };

    spec.snapshot_times = {0.0, t_end};
    spec.trace_dt = 0.01;
    spec.t_end = t_end;

    const double L = spec.cavity_length;
    spec.spectra = {
        filter_spectrum("initial_mode", SpatialFilter::unit(), 0.0),
        filter_spectrum("final_full_mode", SpatialFilter::unit(), t_end),
        bank_spectrum("left_analyzer", "left", t_end),
        filter_spectrum("left_mode", SpatialFilter::boxcar(0.0, spec.banks[0].position),
                        t_end),
        bank_spectrum("right_analyzer", "right", t_end),
        filter_spectrum("right_mode",
                        SpatialFilter::boxcar(spec.banks[1].position, L), t_end),
    };
    spec.comparisons = {
        {"left", "left_analyzer", "left_mode", 0.05},
        {"right", "right_analyzer", "right_mode", 0.05},
        // Static scatterer: once the atom is de-excited the redistribution
        // is elastic, so the full-cavity spectrum matches the initial one.
        {"elastic", "initial_mode", "final_full_mode", 0.05},
    };
    return spec;
}

std::vector<std::string> builtin_scenario_names() {
    return {"one_atom", "three_atoms", "random_photon"};
}

std::optional<ExperimentSpec> builtin_scenario(const std::string& name) {
    if (name == "one_atom") return scenario_one_atom();
    if (name == "three_atoms") return scenario_three_atoms();
    if (name == "random_photon") return scenario_random_photon();
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ValidationError(field + ": " + what);
}

}  // namespace

void validate_experiment(const ExperimentSpec& spec) {
    if (spec.name.empty()) fail("name", "must not be empty");
    if (!(spec.cavity_length > 0.0)) fail("cavity.length", "must be positive");
    if (spec.n_modes < 1) fail("cavity.n_modes", "must be >= 1");
    if (!(spec.t_end > 0.0)) fail("t_end", "must be positive");
    if (!(spec.trace_dt > 0.0)) fail("outputs.trace.dt", "must be positive");
    if (spec.integrator.grid_oversample < 4)
        fail("integrator.grid_oversample", "must be >= 4");
    if (spec.integrator.max_step < 0.0)
        fail("integrator.max_step", "must be >= 0");

    const ModeBasis basis = build_mode_basis(spec.cavity_length, spec.n_modes);
    try {
        if (const auto* g = std::get_if<GaussianPhotonSpec>(&spec.initial_state)) {
            gaussian_photon_state(basis, *g);
        } else {
            const auto& m = std::get<MultiGaussianSpec>(spec.initial_state);
            random_multi_gaussian_state(basis, m.n_components, m.seed, m.k_center,
                                        m.bounds);
        }
    } catch (const std::invalid_argument& e) {
        fail("initial_state", e.what());
    }

    for (std::size_t i = 0; i < spec.scatterers.size(); ++i) {
        try {
            validate_atom(spec.scatterers[i], spec.cavity_length);
        } catch (const std::invalid_argument& e) {
            fail("atoms[" + std::to_string(i) + "]", e.what());
        }
    }

    std::set<std::string> bank_labels;
    for (const auto& bank : spec.banks) {
        if (bank.label.empty()) fail("banks", "bank label must not be empty");
        if (!bank_labels.insert(bank.label).second)
            fail("banks", "duplicate bank label '" + bank.label + "'");
        try {
            validate_bank(bank, spec.cavity_length);
        } catch (const std::invalid_argument& e) {
            fail("banks['" + bank.label + "']", e.what());
        }
        if (bank.t_read > spec.t_end)
            fail("banks['" + bank.label + "'].t_read", "exceeds t_end");
    }

    for (double t : spec.snapshot_times)
        if (t < 0.0 || t > spec.t_end)
            fail("outputs.snapshot_times", "time outside [0, t_end]");

    std::set<std::string> spectrum_names;
    for (const auto& s : spec.spectra) {
        const std::string field = "outputs.spectra['" + s.name + "']";
        if (s.name.empty()) fail("outputs.spectra", "spectrum name must not be empty");
        if (!spectrum_names.insert(s.name).second)
            fail("outputs.spectra", "duplicate spectrum name '" + s.name + "'");
        if (s.bank.has_value() == s.filter.has_value())
            fail(field, "needs exactly one of 'bank' or 'filter'");
        if (s.time < 0.0 || s.time > spec.t_end)
            fail(field + ".time", "outside [0, t_end]");
        if (s.bank) {
            const auto it = std::find_if(
                spec.banks.begin(), spec.banks.end(),
                [&](const AnalyzerBank& b) { return b.label == *s.bank; });
            if (it == spec.banks.end())
                fail(field + ".bank", "unknown bank '" + *s.bank + "'");
            if (s.time < it->t_read)
                fail(field + ".time", "reads bank '" + *s.bank +
                                          "' before its readout time");
        }
    }

    std::set<std::string> comparison_names;
    for (const auto& c : spec.comparisons) {
        const std::string field = "outputs.comparisons['" + c.name + "']";
        if (c.name.empty())
            fail("outputs.comparisons", "comparison name must not be empty");
        if (!comparison_names.insert(c.name).second)
            fail("outputs.comparisons", "duplicate comparison name '" + c.name + "'");
        for (const std::string* ref : {&c.spectrum_a, &c.spectrum_b})
            if (!spectrum_names.count(*ref))
                fail(field, "references unknown spectrum '" + *ref + "'");
        if (!(c.tolerance >= 0.0)) fail(field + ".tolerance", "must be >= 0");
    }

    if (spec.snapshot_times.empty() && spec.spectra.empty())
        fail("outputs", "at least one output must be requested");
}

// ---------------------------------------------------------------------------
// JSON codec

namespace {

void check_keys(const json& j, const std::string& context,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ParseError(context + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
                return key == a;
            }) == allowed.end())
            throw ParseError(context + ": unknown key '" + key + "'");
    }
}

const json& require(const json& j, const std::string& context, const char* key) {
    const auto it = j.find(key);
    if (it == j.end())
        throw ParseError(context + ": missing required key '" + key + "'");
    return *it;
}

double get_number(const json& j, const std::string& context, const char* key) {
    const json& v = require(j, context, key);
    if (!v.is_number())
        throw ParseError(context + "." + key + ": expected a number");
    return v.get<double>();
}

double get_number_or(const json& j, const std::string& context, const char* key,
                     double fallback) {
    if (!j.contains(key)) return fallback;
    return get_number(j, context, key);
}

int get_int(const json& j, const std::string& context, const char* key) {
    const json& v = require(j, context, key);
    if (!v.is_number_integer())
        throw ParseError(context + "." + key + ": expected an integer");
    return v.get<int>();
}

std::string get_string(const json& j, const std::string& context, const char* key) {
    const json& v = require(j, context, key);
    if (!v.is_string())
        throw ParseError(context + "." + key + ": expected a string");
    return v.get<std::string>();
}

json edge_to_json(double t) {
    if (std::isinf(t)) return nullptr;
    return t;
}

double edge_from_json(const json& v, const std::string& context, double sign) {
    if (v.is_null()) return sign * std::numeric_limits<double>::infinity();
    if (!v.is_number()) throw ParseError(context + ": expected number or null");
    return v.get<double>();
}

json filter_to_json(const SpatialFilter& f) {
    json j;
    switch (f.kind) {
        case SpatialFilter::Kind::Unit:
            j["kind"] = "unit";
            break;
        case SpatialFilter::Kind::Gaussian:
            j["kind"] = "gaussian";
            j["center"] = f.center;
            j["sigma"] = f.sigma;
            break;
        case SpatialFilter::Kind::Boxcar:
            j["kind"] = "boxcar";
            j["r_min"] = f.r_min;
            j["r_max"] = f.r_max;
            break;
    }
    return j;
}

SpatialFilter filter_from_json(const json& j, const std::string& context) {
    const std::string kind = get_string(j, context, "kind");
    if (kind == "unit") {
        check_keys(j, context, {"kind"});
        return SpatialFilter::unit();
    }
    if (kind == "gaussian") {
        check_keys(j, context, {"kind", "center", "sigma"});
        return SpatialFilter::gaussian(get_number(j, context, "center"),
                                       get_number(j, context, "sigma"));
    }
    if (kind == "boxcar") {
        check_keys(j, context, {"kind", "r_min", "r_max"});
        return SpatialFilter::boxcar(get_number(j, context, "r_min"),
                                     get_number(j, context, "r_max"));
    }
    throw ParseError(context + ".kind: unknown filter kind '" + kind + "'");
}

}  // namespace

ExperimentSpec parse_experiment(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    const std::string top = "config";
    check_keys(j, top,
               {"name", "cavity", "initial_state", "atoms", "banks", "outputs",
                "integrator", "t_end"});

    ExperimentSpec spec;
    spec.name = get_string(j, top, "name");
    spec.t_end = get_number(j, top, "t_end");

    {
        const json& cav = require(j, top, "cavity");
        check_keys(cav, "cavity", {"length", "n_modes"});
        spec.cavity_length = get_number(cav, "cavity", "length");
        spec.n_modes = get_int(cav, "cavity", "n_modes");
    }

    {
        const json& init = require(j, top, "initial_state");
        const std::string type = get_string(init, "initial_state", "type");
        if (type == "gaussian") {
            check_keys(init, "initial_state",
                       {"type", "k_center", "k_sigma", "center_position"});
            GaussianPhotonSpec g;
            g.k_center = get_number(init, "initial_state", "k_center");
            g.k_sigma = get_number(init, "initial_state", "k_sigma");
            g.center_position = get_number(init, "initial_state", "center_position");
            spec.initial_state = g;
        } else if (type == "multi_gaussian") {
            check_keys(init, "initial_state",
                       {"type", "n_components", "seed", "k_center", "bounds"});
            MultiGaussianSpec m;
            m.n_components = get_int(init, "initial_state", "n_components");
            m.seed = require(init, "initial_state", "seed").get<std::uint64_t>();
            m.k_center = get_number(init, "initial_state", "k_center");
            const json& b = require(init, "initial_state", "bounds");
            check_keys(b, "initial_state.bounds",
                       {"k_halfwidth", "sigma_min", "sigma_max", "r_min", "r_max"});
            m.bounds.k_halfwidth = get_number(b, "initial_state.bounds", "k_halfwidth");
            m.bounds.sigma_min = get_number(b, "initial_state.bounds", "sigma_min");
            m.bounds.sigma_max = get_number(b, "initial_state.bounds", "sigma_max");
            m.bounds.r_min = get_number(b, "initial_state.bounds", "r_min");
            m.bounds.r_max = get_number(b, "initial_state.bounds", "r_max");
            spec.initial_state = m;
        } else {
            throw ParseError("initial_state.type: expected 'gaussian' or "
                             "'multi_gaussian', got '" + type + "'");
        }
    }

    if (j.contains("atoms")) {
        const json& atoms = j["atoms"];
        if (!atoms.is_array()) throw ParseError("atoms: expected an array");
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            const std::string ctx = "atoms[" + std::to_string(i) + "]";
            const json& a = atoms[i];
            check_keys(a, ctx, {"position", "frequency", "decay_rate", "schedule"});
            std::vector<ActivationWindow> schedule{always_on()};
            if (a.contains("schedule")) {
                if (!a["schedule"].is_array())
                    throw ParseError(ctx + ".schedule: expected an array of windows");
                schedule.clear();
                for (const json& w : a["schedule"]) {
                    if (!w.is_array() || w.size() != 2)
                        throw ParseError(ctx + ".schedule: each window is [t_on, t_off]");
                    schedule.push_back(
                        {edge_from_json(w[0], ctx + ".schedule", -1.0),
                         edge_from_json(w[1], ctx + ".schedule", +1.0)});
                }
            }
            spec.scatterers.push_back(make_scatterer(
                get_number(a, ctx, "position"), get_number(a, ctx, "frequency"),
                get_number(a, ctx, "decay_rate"), std::move(schedule)));
        }
    }

    if (j.contains("banks")) {
        const json& banks = j["banks"];
        if (!banks.is_array()) throw ParseError("banks: expected an array");
        for (const json& b : banks) {
            AnalyzerBank bank;
            bank.label = get_string(b, "banks[]", "label");
            const std::string ctx = "banks['" + bank.label + "']";
            check_keys(b, ctx,
                       {"label", "n_atoms", "omega_min", "omega_max", "position",
                        "decay_rate", "t_on", "t_read"});
            bank.n_atoms = get_int(b, ctx, "n_atoms");
            bank.omega_min = get_number(b, ctx, "omega_min");
            bank.omega_max = get_number(b, ctx, "omega_max");
            bank.position = get_number(b, ctx, "position");
            bank.t_on = get_number(b, ctx, "t_on");
            bank.t_read = get_number(b, ctx, "t_read");
            if (bank.n_atoms < 2)
                throw ParseError(ctx + ".n_atoms: need at least 2");
            bank.decay_rate =
                get_number_or(b, ctx, "decay_rate", bank.comb_spacing() / 400.0);
            spec.banks.push_back(bank);
        }
    }

    {
        const json& out = require(j, top, "outputs");
        check_keys(out, "outputs",
                   {"snapshot_times", "trace", "spectra", "comparisons"});
        if (out.contains("snapshot_times")) {
            for (const json& t : out["snapshot_times"]) {
                if (!t.is_number())
                    throw ParseError("outputs.snapshot_times: expected numbers");
                spec.snapshot_times.push_back(t.get<double>());
            }
        }
        if (out.contains("trace")) {
            check_keys(out["trace"], "outputs.trace", {"dt"});
            spec.trace_dt = get_number(out["trace"], "outputs.trace", "dt");
        }
        if (out.contains("spectra")) {
            for (const json& s : out["spectra"]) {
                SpectrumRequest req;
                req.name = get_string(s, "outputs.spectra[]", "name");
                const std::string ctx = "outputs.spectra['" + req.name + "']";
                check_keys(s, ctx, {"name", "bank", "filter", "time"});
                req.time = get_number(s, ctx, "time");
                if (s.contains("bank")) req.bank = get_string(s, ctx, "bank");
                if (s.contains("filter"))
                    req.filter = filter_from_json(s["filter"], ctx + ".filter");
                spec.spectra.push_back(std::move(req));
            }
        }
        if (out.contains("comparisons")) {
            for (const json& c : out["comparisons"]) {
                ComparisonRequest req;
                req.name = get_string(c, "outputs.comparisons[]", "name");
                const std::string ctx = "outputs.comparisons['" + req.name + "']";
                check_keys(c, ctx, {"name", "a", "b", "tolerance"});
                req.spectrum_a = get_string(c, ctx, "a");
                req.spectrum_b = get_string(c, ctx, "b");
                req.tolerance = get_number_or(c, ctx, "tolerance", 0.05);
                spec.comparisons.push_back(std::move(req));
            }
        }
    }

    if (j.contains("integrator")) {
        const json& integ = j["integrator"];
        check_keys(integ, "integrator", {"backend", "max_step", "grid_oversample"});
        if (integ.contains("backend")) {
            const std::string backend = get_string(integ, "integrator", "backend");
            if (backend == "eigendecomposition")
                spec.integrator.backend = PropagatorBackend::Eigendecomposition;
            else if (backend == "rk4")
                spec.integrator.backend = PropagatorBackend::RungeKutta4;
            else
                throw ParseError(
                    "integrator.backend: expected 'eigendecomposition' or 'rk4'");
        }
        spec.integrator.max_step = get_number_or(integ, "integrator", "max_step", 0.0);
        if (integ.contains("grid_oversample"))
            spec.integrator.grid_oversample = get_int(integ, "integrator",
                                                      "grid_oversample");
    }

    validate_experiment(spec);
    return spec;
}

std::string render_experiment(const ExperimentSpec& spec) {
    json j;
    j["name"] = spec.name;
    j["t_end"] = spec.t_end;
    j["cavity"] = {{"length", spec.cavity_length}, {"n_modes", spec.n_modes}};

    if (const auto* g = std::get_if<GaussianPhotonSpec>(&spec.initial_state)) {
        j["initial_state"] = {{"type", "gaussian"},
                              {"k_center", g->k_center},
                              {"k_sigma", g->k_sigma},
                              {"center_position", g->center_position}};
    } else {
        const auto& m = std::get<MultiGaussianSpec>(spec.initial_state);
        j["initial_state"] = {
            {"type", "multi_gaussian"},
            {"n_components", m.n_components},
            {"seed", m.seed},
            {"k_center", m.k_center},
            {"bounds",
             {{"k_halfwidth", m.bounds.k_halfwidth},
              {"sigma_min", m.bounds.sigma_min},
              {"sigma_max", m.bounds.sigma_max},
              {"r_min", m.bounds.r_min},
              {"r_max", m.bounds.r_max}}}};
    }

    j["atoms"] = json::array();
    for (const auto& atom : spec.scatterers) {
        json windows = json::array();
        for (const auto& w : atom.schedule)
            windows.push_back({edge_to_json(w.t_on), edge_to_json(w.t_off)});
        j["atoms"].push_back({{"position", atom.position},
                              {"frequency", atom.frequency},
                              {"decay_rate", atom.decay_rate},
                              {"schedule", windows}});
    }

    j["banks"] = json::array();
    for (const auto& bank : spec.banks) {
        j["banks"].push_back({{"label", bank.label},
                              {"n_atoms", bank.n_atoms},
                              {"omega_min", bank.omega_min},
                              {"omega_max", bank.omega_max},
                              {"position", bank.position},
                              {"decay_rate", bank.decay_rate},
                              {"t_on", bank.t_on},
                              {"t_read", bank.t_read}});
    }

    json out;
    out["snapshot_times"] = spec.snapshot_times;
    out["trace"] = {{"dt", spec.trace_dt}};
    out["spectra"] = json::array();
    for (const auto& s : spec.spectra) {
        json req = {{"name", s.name}, {"time", s.time}};
        if (s.bank) req["bank"] = *s.bank;
        if (s.filter) req["filter"] = filter_to_json(*s.filter);
        out["spectra"].push_back(req);
    }
    out["comparisons"] = json::array();
    for (const auto& c : spec.comparisons) {
        out["comparisons"].push_back({{"name", c.name},
                                      {"a", c.spectrum_a},
                                      {"b", c.spectrum_b},
                                      {"tolerance", c.tolerance}});
    }
    j["outputs"] = out;

    j["integrator"] = {
        {"backend", spec.integrator.backend == PropagatorBackend::Eigendecomposition
                        ? "eigendecomposition"
                        : "rk4"},
        {"max_step", spec.integrator.max_step},
        {"grid_oversample", spec.integrator.grid_oversample}};

    return j.dump(2) + "\n";
}

}  // namespace cavityspec
