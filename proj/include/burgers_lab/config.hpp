#pragma once

// Experiment configuration. TOML is converted to the same JSON tree that a
// .json config parses to, and one reader validates both.

#include "burgers_lab/flux.hpp"
#include "burgers_lab/forcing.hpp"
#include "burgers_lab/integrator.hpp"
#include "burgers_lab/linear_parabolic.hpp"
#include "burgers_lab/parallel.hpp"
#include "burgers_lab/random_fields.hpp"

#include <json.hpp>
#include <toml.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace burgers_lab {

inline constexpr int kSchemaVersion = 1;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { Oracle, Contraction, Dissipativity, HarnackSweep, Pullback, StochasticSync, FullSuite };

inline const std::vector<ExperimentKind>& all_experiment_kinds() {
    static const std::vector<ExperimentKind> kinds{
        ExperimentKind::Oracle,   ExperimentKind::Contraction,    ExperimentKind::Dissipativity,
        ExperimentKind::HarnackSweep, ExperimentKind::Pullback, ExperimentKind::StochasticSync,
        ExperimentKind::FullSuite};
    return kinds;
}

inline const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Oracle: return "oracle";
        case ExperimentKind::Contraction: return "contraction";
        case ExperimentKind::Dissipativity: return "dissipativity";
        case ExperimentKind::HarnackSweep: return "harnack_sweep";
        case ExperimentKind::Pullback: return "pullback";
        case ExperimentKind::StochasticSync: return "stochastic_sync";
        case ExperimentKind::FullSuite: return "full_suite";
    }
    return "?";
}

inline ExperimentKind parse_experiment_kind(const std::string& s) {
    for (ExperimentKind k : all_experiment_kinds()) {
        if (s == to_string(k)) return k;
    }
    throw ConfigError("unknown experiment '" + s + "'");
}

/// One closed-form term of an initial condition or forcing profile.
///   sin / cos:     amplitude * sin|cos(2 pi mode x + phase)
///   positive_sin:  amplitude * max(0, sin(2 pi mode x + phase))
///   sawtooth:      amplitude * (frac(mode x + phase / 2 pi) - 1/2)
///   gaussian:      amplitude * exp(-d^2 / (2 width^2)), d the periodic distance to center
///   random:        band-limited field with `modes` cosines, amplitudes ~ k^-decay,
///                  scaled to L1 norm `amplitude`
/// time_mode / time_phase only matter for time-periodic forcing.
struct TermSpec {
    std::string shape = "sin";
    double amplitude = 1.0;
    int mode = 1;
    double phase = 0.0;
    double center = 0.5;
    double width = 0.1;
    int modes = 4;
    double decay = 2.0;
    std::optional<std::uint64_t> seed;  // random terms; falls back to the run seed
    int time_mode = 0;
    double time_phase = 0.0;
};

struct FieldSpec {
    std::vector<TermSpec> terms;
    double mean = 0.0;  // constant offset c

    static FieldSpec zero() { return {}; }
    static FieldSpec single(TermSpec t, double mean = 0.0) { return FieldSpec{{std::move(t)}, mean}; }

    /// `time_factor(term)` multiplies each term; used for time-periodic profiles.
    template <class TimeFactor>
    Field build(const PeriodicGrid& grid, std::uint64_t run_seed, TimeFactor time_factor) const {
        std::vector<double> values(grid.n(), mean);
        std::size_t term_index = 0;
        for (const TermSpec& t : terms) {
            const double tf = time_factor(t);
            if (t.shape == "random") {
                std::mt19937_64 rng(t.seed ? *t.seed : derive_seed(run_seed, 0x51, term_index));
                const Field r = random_bandlimited(grid, t.modes, t.decay, t.amplitude, rng);
                for (std::size_t j = 0; j < grid.n(); ++j) values[j] += tf * r[j];
            } else {
                for (std::size_t j = 0; j < grid.n(); ++j) values[j] += tf * eval_term(t, grid.node(j));
            }
            ++term_index;
        }
        return Field(grid, std::move(values));
    }

    Field build(const PeriodicGrid& grid, std::uint64_t run_seed = 0) const {
        return build(grid, run_seed, [](const TermSpec&) { return 1.0; });
    }

    static double eval_term(const TermSpec& t, double x) {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        const double arg = two_pi * t.mode * x + t.phase;
        if (t.shape == "sin") return t.amplitude * std::sin(arg);
        if (t.shape == "cos") return t.amplitude * std::cos(arg);
        if (t.shape == "positive_sin") return t.amplitude * std::max(0.0, std::sin(arg));
        if (t.shape == "sawtooth") {
            const double s = t.mode * x + t.phase / two_pi;
            return t.amplitude * (s - std::floor(s) - 0.5);
        }
        if (t.shape == "gaussian") {
            double d = std::abs(x - t.center);
            d -= std::floor(d);
            d = std::min(d, 1.0 - d);
            return t.amplitude * std::exp(-d * d / (2.0 * t.width * t.width));
        }
        throw ConfigError("unknown shape '" + t.shape + "'");
    }
};

struct FluxSpec {
    std::string kind = "quadratic";  // zero | linear | quadratic | polynomial
    double speed = 1.0;              // linear
    std::vector<double> coefficients;  // polynomial, f(u) = sum c_k u^k
    std::optional<double> sigma_floor;

    FluxModel build() const {
        if (kind == "zero") return FluxModel::zero().with_sigma_floor(sigma_floor.value_or(0.0));
        if (kind == "linear") return FluxModel::linear(speed).with_sigma_floor(sigma_floor.value_or(0.0));
        if (kind == "quadratic") return FluxModel::quadratic(sigma_floor.value_or(1.0));
        if (kind == "polynomial") {
            if (coefficients.empty()) throw ConfigError("polynomial flux needs coefficients");
            return FluxModel::polynomial(coefficients, sigma_floor.value_or(0.0));
        }
        throw ConfigError("unknown flux kind '" + kind + "'");
    }
};

struct ForcingSpec {
    std::string kind = "zero";  // zero | steady | time_periodic | stochastic
    FieldSpec profile;
    double period = 1.0;
    int samples = 32;
    StochasticSpec stochastic;

    ForcingModel build(const PeriodicGrid& grid, std::uint64_t seed) const {
        if (kind == "zero") return ForcingModel::zero();
        if (kind == "steady") return ForcingModel::steady(profile.build(grid, seed));
        if (kind == "time_periodic") {
            if (!(period > 0.0)) throw ConfigError("forcing period must be positive");
            if (samples < 2) throw ConfigError("time_periodic forcing needs at least 2 samples");
            std::vector<Field> frames;
            for (int s = 0; s < samples; ++s) {
                const double tau = static_cast<double>(s) / samples;
                frames.push_back(profile.build(grid, seed, [&](const TermSpec& t) {
                    return t.time_mode == 0 ? std::cos(t.time_phase)
                                            : std::cos(2.0 * std::numbers::pi * t.time_mode * tau + t.time_phase);
                }));
            }
            return ForcingModel::time_periodic(frames, period);
        }
        if (kind == "stochastic") {
            if (stochastic.modes < 1) throw ConfigError("stochastic forcing needs modes >= 1");
            if (!(stochastic.lambda > 0.0)) throw ConfigError("stochastic lambda must be positive");
            if (!(stochastic.amplitude >= 0.0)) throw ConfigError("stochastic amplitude must be non-negative");
            if (!(stochastic.dt > 0.0 && stochastic.horizon > 0.0)) {
                throw ConfigError("stochastic dt and horizon must be positive");
            }
            return make_stochastic_forcing(stochastic, seed);
        }
        throw ConfigError("unknown forcing kind '" + kind + "'");
    }
};

struct OracleParams {
    double T = 1.0;
    std::optional<double> tolerance;  // default 1e-6 for linear references, 1e-4 for Cole-Hopf
};

struct ContractionParams {
    double R = 1.0;
    double T = 1.0;
    int modes = 4;
    double decay = 2.0;
    int coefficient_order = 3;
    double split_tolerance = 1e-6;
    // Exponential decay of |u - v|_1 for pairs of several sizes.
    bool decay_fit = true;
    std::vector<double> decay_sizes{0.1, 1.0, 10.0};
    double fit_t_lo = 1.0;
    double fit_t_hi = 20.0;
    double decay_nu = 0.02;
    long decay_n = 512;
    double decay_dt = 1e-3;
    FieldSpec decay_forcing;
};

struct DissipativityParams {
    double T = 8.0;
    std::vector<double> sizes{1.0, 100.0};
    std::vector<double> kruzhkov_amplitudes{1.0, 10.0, 100.0};
    double ceiling_spread = 1.2;
};

struct HarnackParams {
    std::vector<double> rho{0.0, 1.0, 5.0};
    std::size_t trials = 50;
    double T_prime = 0.5;
    double T = 1.0;
    LinearScheme scheme = LinearScheme::FiniteVolume;
    std::size_t nonexpansion_cases = 100;
    double rho_max_nonexpansion = 5.0;
};

struct PullbackParams {
    double c = 0.0;
    int n_max = 8;
    double T_view = 1.0;
    double compare_every = 0.01;
    double dt_h2_tolerance = 1e-5;
    std::vector<double> probe_sizes{0.1, 1.0, 10.0};
};

struct SyncParams {
    double T_end = 50.0;
    double final_ratio_max = 1e-3;
};

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    ExperimentKind experiment = ExperimentKind::Oracle;
    SolverConfig solver;
    FluxSpec flux;
    ForcingSpec forcing;
    FieldSpec initial;
    FieldSpec initial_v;
    std::string output_dir;
    std::vector<std::uint64_t> seeds{1};
    std::size_t threads = 1;

    OracleParams oracle;
    ContractionParams contraction;
    DissipativityParams dissipativity;
    HarnackParams harnack;
    PullbackParams pullback;
    SyncParams sync;

    /// Builds every referenced object once so that errors surface before any run.
    void validate() const {
        if (schema_version != kSchemaVersion) {
            throw ConfigError("unsupported schema_version " + std::to_string(schema_version));
        }
        try {
            solver.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        if (seeds.empty()) throw ConfigError("seed list is empty");
        if (threads == 0) throw ConfigError("threads must be positive");
        try {
            const PeriodicGrid grid = PeriodicGrid::make(solver.n);
            (void)flux.build();
            (void)forcing.build(grid, seeds.front());
            (void)initial.build(grid, seeds.front());
            (void)initial_v.build(grid, seeds.front());
            if (contraction.decay_fit && experiment == ExperimentKind::Contraction) {
                (void)contraction.decay_forcing.build(PeriodicGrid::make(contraction.decay_n), 0);
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
        auto positive = [](double v, const char* what) {
            if (!(v > 0.0)) throw ConfigError(std::string(what) + " must be positive");
        };
        switch (experiment) {
            case ExperimentKind::Oracle:
                positive(oracle.T, "oracle.T");
                if (forcing.kind != "zero") throw ConfigError("oracle needs zero forcing");
                if (flux.kind != "zero" && flux.kind != "linear" && flux.kind != "quadratic") {
                    throw ConfigError("oracle needs a zero, linear or quadratic flux");
                }
                break;
            case ExperimentKind::Contraction:
                positive(contraction.R, "contraction.R");
                positive(contraction.T, "contraction.T");
                if (contraction.decay_fit) {
                    if (contraction.decay_sizes.empty()) throw ConfigError("contraction.decay_sizes is empty");
                    if (!(contraction.fit_t_hi > contraction.fit_t_lo)) {
                        throw ConfigError("contraction fit window is empty");
                    }
                    positive(contraction.decay_nu, "contraction.decay_nu");
                    positive(contraction.decay_dt, "contraction.decay_dt");
                    try {
                        PeriodicGrid::make(contraction.decay_n);
                    } catch (const std::exception& e) {
                        throw ConfigError(e.what());
                    }
                }
                break;
            case ExperimentKind::Dissipativity:
                if (!(dissipativity.T >= 3.0)) throw ConfigError("dissipativity.T must be at least 3");
                if (dissipativity.sizes.empty()) throw ConfigError("dissipativity.sizes is empty");
                break;
            case ExperimentKind::HarnackSweep:
                if (harnack.rho.empty()) throw ConfigError("harnack.rho is empty");
                if (harnack.trials == 0) throw ConfigError("harnack.trials must be positive");
                if (!(harnack.T_prime > 0.0 && harnack.T > harnack.T_prime)) {
                    throw ConfigError("harnack needs 0 < T_prime < T");
                }
                break;
            case ExperimentKind::Pullback:
                if (pullback.n_max < 3) throw ConfigError("pullback.n_max must be at least 3");
                positive(pullback.T_view, "pullback.T_view");
                if (forcing.kind == "stochastic") throw ConfigError("pullback needs deterministic forcing");
                break;
            case ExperimentKind::StochasticSync:
                if (forcing.kind != "stochastic") throw ConfigError("stochastic_sync needs stochastic forcing");
                if (!(sync.T_end >= 3.0)) throw ConfigError("sync.T_end must be at least 3");
                if (!(flux.build().sigma_floor() > 0.0)) throw ConfigError("convexity required");
                {
                    const PeriodicGrid grid = PeriodicGrid::make(solver.n);
                    for (std::uint64_t s : seeds) {
                        const double gap = mean_value(initial.build(grid, s)) - mean_value(initial_v.build(grid, s));
                        if (std::abs(gap) > 1e-12) throw ConfigError("mean mismatch between initial and initial_v");
                    }
                }
                break;
            case ExperimentKind::FullSuite:
                break;
        }
    }
};

// ---------------------------------------------------------------------------
// Parsing

namespace config_detail {

using nlohmann::json;

inline json from_toml(const toml::node& node) {
    if (const auto* t = node.as_table()) {
        json j = json::object();
        for (const auto& [k, v] : *t) j[std::string(k.str())] = from_toml(v);
        return j;
    }
    if (const auto* a = node.as_array()) {
        json j = json::array();
        for (const auto& v : *a) j.push_back(from_toml(v));
        return j;
    }
    if (const auto* v = node.as_string()) return v->get();
    if (const auto* v = node.as_integer()) return v->get();
    if (const auto* v = node.as_floating_point()) return v->get();
    if (const auto* v = node.as_boolean()) return v->get();
    throw ConfigError("unsupported TOML value (dates and times are not used)");
}

class Reader {
public:
    Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + " must be a table");
    }

    void allow(std::initializer_list<const char*> keys) {
        std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& [k, v] : j_.items()) {
            if (!ok.count(k)) throw ConfigError("unknown key '" + k + "' in " + where_);
        }
    }

    bool has(const char* key) const { return j_.contains(key); }
    const json& raw(const char* key) const { return j_.at(key); }
    std::string path(const char* key) const { return where_ + "." + key; }

    double num(const char* key, double fallback) const {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number()) throw ConfigError(path(key) + " must be a number");
        return v.get<double>();
    }

    long integer(const char* key, long fallback) const {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number_integer()) throw ConfigError(path(key) + " must be an integer");
        return v.get<long>();
    }

    std::size_t count(const char* key, std::size_t fallback) const {
        const long v = integer(key, static_cast<long>(fallback));
        if (v < 0) throw ConfigError(path(key) + " must be non-negative");
        return static_cast<std::size_t>(v);
    }

    bool flag(const char* key, bool fallback) const {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_boolean()) throw ConfigError(path(key) + " must be true or false");
        return v.get<bool>();
    }

    std::string str(const char* key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_string()) throw ConfigError(path(key) + " must be a string");
        return v.get<std::string>();
    }

    std::vector<double> nums(const char* key, std::vector<double> fallback) const {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_array()) throw ConfigError(path(key) + " must be an array of numbers");
        std::vector<double> out;
        for (const json& e : v) {
            if (!e.is_number()) throw ConfigError(path(key) + " must be an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

private:
    const json& j_;
    std::string where_;
};

inline TermSpec parse_term(const json& j, const std::string& where) {
    Reader r(j, where);
    r.allow({"shape", "amplitude", "mode", "phase", "center", "width", "modes", "decay", "seed", "time_mode",
             "time_phase"});
    TermSpec t;
    t.shape = r.str("shape", t.shape);
    static const std::set<std::string> shapes{"sin", "cos", "positive_sin", "sawtooth", "gaussian", "random"};
    if (!shapes.count(t.shape)) throw ConfigError("unknown shape '" + t.shape + "' in " + where);
    t.amplitude = r.num("amplitude", t.amplitude);
    t.mode = static_cast<int>(r.integer("mode", t.mode));
    t.phase = r.num("phase", t.phase);
    t.center = r.num("center", t.center);
    t.width = r.num("width", t.width);
    t.modes = static_cast<int>(r.integer("modes", t.modes));
    t.decay = r.num("decay", t.decay);
    if (r.has("seed")) t.seed = static_cast<std::uint64_t>(r.count("seed", 0));
    t.time_mode = static_cast<int>(r.integer("time_mode", t.time_mode));
    t.time_phase = r.num("time_phase", t.time_phase);
    if (t.shape == "gaussian" && !(t.width > 0.0)) throw ConfigError(where + ".width must be positive");
    if (t.shape == "random" && t.modes < 1) throw ConfigError(where + ".modes must be at least 1");
    return t;
}

/// Either a single term written inline ({shape = "sin", amplitude = 1, mean = 0.2})
/// or {terms = [...], mean = ...}.
inline FieldSpec parse_field(const json& j, const std::string& where) {
    FieldSpec f;
    if (!j.is_object()) throw ConfigError(where + " must be a table");
    if (j.contains("terms")) {
        Reader r(j, where);
        r.allow({"terms", "mean"});
        f.mean = r.num("mean", 0.0);
        const json& terms = j.at("terms");
        if (!terms.is_array()) throw ConfigError(where + ".terms must be an array of tables");
        for (std::size_t i = 0; i < terms.size(); ++i) {
            f.terms.push_back(parse_term(terms[i], where + ".terms[" + std::to_string(i) + "]"));
        }
        return f;
    }
    json copy = j;
    if (copy.contains("mean")) {
        if (!copy["mean"].is_number()) throw ConfigError(where + ".mean must be a number");
        f.mean = copy["mean"].get<double>();
        copy.erase("mean");
    }
    if (copy.contains("shape") && copy["shape"] == "zero") {
        copy.erase("shape");
        if (!copy.empty()) throw ConfigError(where + ": shape 'zero' takes no parameters besides mean");
        return f;
    }
    if (copy.contains("shape") && copy["shape"] == "constant") return f;
    if (!copy.empty()) f.terms.push_back(parse_term(copy, where));
    return f;
}

inline Scheme parse_scheme(const std::string& s) {
    if (s == "IMEX_IF_RK3") return Scheme::IMEX_IF_RK3;
    if (s == "CN_AB2") return Scheme::CN_AB2;
    throw ConfigError("unknown scheme '" + s + "'");
}

inline LinearScheme parse_linear_scheme(const std::string& s) {
    if (s == "spectral") return LinearScheme::Spectral;
    if (s == "finite_volume") return LinearScheme::FiniteVolume;
    throw ConfigError("unknown linear scheme '" + s + "'");
}

}  // namespace config_detail

/// Solver and experiment defaults per experiment kind; a config file only
/// needs to state what differs.
inline ExperimentConfig default_config(ExperimentKind kind) {
    ExperimentConfig c;
    c.experiment = kind;
    c.output_dir = std::string("out/") + to_string(kind);
    TermSpec sin1;
    switch (kind) {
        case ExperimentKind::Oracle:
            c.flux.kind = "zero";
            c.initial = FieldSpec::single(sin1);
            break;
        case ExperimentKind::Contraction: {
            c.solver.n = 512;
            c.solver.dt = 2.5e-4;
            c.seeds.clear();
            for (std::uint64_t s = 1000; s < 1020; ++s) c.seeds.push_back(s);
            TermSpec a = sin1;
            a.amplitude = 0.1;
            TermSpec b;
            b.shape = "cos";
            b.mode = 2;
            b.amplitude = 0.05;
            c.contraction.decay_forcing = FieldSpec{{a, b}, 0.0};
            break;
        }
        case ExperimentKind::Dissipativity: {
            c.solver.n = 256;
            c.forcing.kind = "steady";
            c.forcing.profile = FieldSpec::single(sin1);
            break;
        }
        case ExperimentKind::HarnackSweep:
            break;
        case ExperimentKind::Pullback: {
            c.forcing.kind = "steady";
            TermSpec h = sin1;
            h.amplitude = 0.5;
            c.forcing.profile = FieldSpec::single(h);
            break;
        }
        case ExperimentKind::StochasticSync: {
            c.forcing.kind = "stochastic";
            c.seeds.clear();
            for (std::uint64_t s = 1; s <= 10; ++s) c.seeds.push_back(s);
            TermSpec r;
            r.shape = "random";
            r.modes = 4;
            r.decay = 2.0;
            r.amplitude = 1.0;
            c.initial = FieldSpec::single(r);
            c.initial_v = FieldSpec::zero();
            break;
        }
        case ExperimentKind::FullSuite:
            break;
    }
    return c;
}

inline ExperimentConfig parse_config(const nlohmann::json& root) {
    using config_detail::Reader;
    Reader top(root, "config");
    top.allow({"schema_version", "experiment", "output_dir", "seeds", "threads", "solver", "flux", "forcing",
               "initial", "initial_v", "oracle", "contraction", "dissipativity", "harnack_sweep", "pullback",
               "stochastic_sync"});
    if (!top.has("schema_version")) throw ConfigError("missing schema_version");
    if (!top.has("experiment")) throw ConfigError("missing experiment");
    ExperimentConfig c = default_config(parse_experiment_kind(top.str("experiment", "")));
    c.schema_version = static_cast<int>(top.integer("schema_version", 0));
    if (c.schema_version != kSchemaVersion) {
        throw ConfigError("unsupported schema_version " + std::to_string(c.schema_version));
    }
    c.output_dir = top.str("output_dir", c.output_dir);
    c.threads = top.count("threads", c.threads);
    if (top.has("seeds")) {
        c.seeds.clear();
        const auto& s = top.raw("seeds");
        if (!s.is_array()) throw ConfigError("seeds must be an array of non-negative integers");
        for (const auto& e : s) {
            if (!e.is_number_integer() || e.get<long long>() < 0) {
                throw ConfigError("seeds must be an array of non-negative integers");
            }
            c.seeds.push_back(e.get<std::uint64_t>());
        }
    }

    if (top.has("solver")) {
        Reader r(top.raw("solver"), "solver");
        r.allow({"nu", "n", "dt", "scheme", "dealias", "cfl_safety", "blowup_linf", "record_stride",
                 "snapshot_stride"});
        SolverConfig& s = c.solver;
        s.nu = r.num("nu", s.nu);
        s.n = r.integer("n", s.n);
        s.dt = r.num("dt", s.dt);
        s.scheme = config_detail::parse_scheme(r.str("scheme", to_string(s.scheme)));
        s.dealias = r.flag("dealias", s.dealias);
        s.cfl_safety = r.num("cfl_safety", s.cfl_safety);
        s.blowup_linf = r.num("blowup_linf", s.blowup_linf);
        s.record_stride = r.count("record_stride", s.record_stride);
        s.snapshot_stride = r.count("snapshot_stride", s.snapshot_stride);
    }
    if (top.has("flux")) {
        Reader r(top.raw("flux"), "flux");
        r.allow({"kind", "speed", "coefficients", "sigma_floor"});
        c.flux.kind = r.str("kind", c.flux.kind);
        c.flux.speed = r.num("speed", c.flux.speed);
        c.flux.coefficients = r.nums("coefficients", c.flux.coefficients);
        if (r.has("sigma_floor")) c.flux.sigma_floor = r.num("sigma_floor", 0.0);
    }
    if (top.has("forcing")) {
        Reader r(top.raw("forcing"), "forcing");
        r.allow({"kind", "profile", "period", "samples", "modes", "decay_p", "lambda", "amplitude", "dt", "horizon"});
        ForcingSpec& f = c.forcing;
        f.kind = r.str("kind", f.kind);
        if (r.has("profile")) f.profile = config_detail::parse_field(r.raw("profile"), "forcing.profile");
        f.period = r.num("period", f.period);
        f.samples = static_cast<int>(r.integer("samples", f.samples));
        f.stochastic.modes = static_cast<int>(r.integer("modes", f.stochastic.modes));
        f.stochastic.decay_p = r.num("decay_p", f.stochastic.decay_p);
        f.stochastic.lambda = r.num("lambda", f.stochastic.lambda);
        f.stochastic.amplitude = r.num("amplitude", f.stochastic.amplitude);
        f.stochastic.dt = r.num("dt", f.stochastic.dt);
        f.stochastic.horizon = r.num("horizon", f.stochastic.horizon);
    }
    if (top.has("initial")) c.initial = config_detail::parse_field(top.raw("initial"), "initial");
    if (top.has("initial_v")) c.initial_v = config_detail::parse_field(top.raw("initial_v"), "initial_v");

    if (top.has("oracle")) {
        Reader r(top.raw("oracle"), "oracle");
        r.allow({"T", "tolerance"});
        c.oracle.T = r.num("T", c.oracle.T);
        if (r.has("tolerance")) c.oracle.tolerance = r.num("tolerance", 0.0);
    }
    if (top.has("contraction")) {
        Reader r(top.raw("contraction"), "contraction");
        r.allow({"R", "T", "modes", "decay", "coefficient_order", "split_tolerance", "decay_fit", "decay_sizes",
                 "fit_t_lo", "fit_t_hi", "decay_nu", "decay_n", "decay_dt", "decay_forcing"});
        ContractionParams& p = c.contraction;
        p.R = r.num("R", p.R);
        p.T = r.num("T", p.T);
        p.modes = static_cast<int>(r.integer("modes", p.modes));
        p.decay = r.num("decay", p.decay);
        p.coefficient_order = static_cast<int>(r.integer("coefficient_order", p.coefficient_order));
        p.split_tolerance = r.num("split_tolerance", p.split_tolerance);
        p.decay_fit = r.flag("decay_fit", p.decay_fit);
        p.decay_sizes = r.nums("decay_sizes", p.decay_sizes);
        p.fit_t_lo = r.num("fit_t_lo", p.fit_t_lo);
        p.fit_t_hi = r.num("fit_t_hi", p.fit_t_hi);
        p.decay_nu = r.num("decay_nu", p.decay_nu);
        p.decay_n = r.integer("decay_n", p.decay_n);
        p.decay_dt = r.num("decay_dt", p.decay_dt);
        if (r.has("decay_forcing")) {
            p.decay_forcing = config_detail::parse_field(r.raw("decay_forcing"), "contraction.decay_forcing");
        }
        if (p.modes < 1) throw ConfigError("contraction.modes must be at least 1");
        if (p.coefficient_order < 1 || p.coefficient_order > 15 || p.coefficient_order % 2 == 0) {
            throw ConfigError("contraction.coefficient_order must be odd and at most 15");
        }
    }
    if (top.has("dissipativity")) {
        Reader r(top.raw("dissipativity"), "dissipativity");
        r.allow({"T", "sizes", "kruzhkov_amplitudes", "ceiling_spread"});
        DissipativityParams& p = c.dissipativity;
        p.T = r.num("T", p.T);
        p.sizes = r.nums("sizes", p.sizes);
        p.kruzhkov_amplitudes = r.nums("kruzhkov_amplitudes", p.kruzhkov_amplitudes);
        p.ceiling_spread = r.num("ceiling_spread", p.ceiling_spread);
    }
    if (top.has("harnack_sweep")) {
        Reader r(top.raw("harnack_sweep"), "harnack_sweep");
        r.allow({"rho", "trials", "T_prime", "T", "scheme", "nonexpansion_cases", "rho_max_nonexpansion"});
        HarnackParams& p = c.harnack;
        p.rho = r.nums("rho", p.rho);
        p.trials = r.count("trials", p.trials);
        p.T_prime = r.num("T_prime", p.T_prime);
        p.T = r.num("T", p.T);
        if (r.has("scheme")) p.scheme = config_detail::parse_linear_scheme(r.str("scheme", ""));
        p.nonexpansion_cases = r.count("nonexpansion_cases", p.nonexpansion_cases);
        p.rho_max_nonexpansion = r.num("rho_max_nonexpansion", p.rho_max_nonexpansion);
    }
    if (top.has("pullback")) {
        Reader r(top.raw("pullback"), "pullback");
        r.allow({"c", "n_max", "T_view", "compare_every", "dt_h2_tolerance", "probe_sizes"});
        PullbackParams& p = c.pullback;
        p.c = r.num("c", p.c);
        p.n_max = static_cast<int>(r.integer("n_max", p.n_max));
        p.T_view = r.num("T_view", p.T_view);
        p.compare_every = r.num("compare_every", p.compare_every);
        p.dt_h2_tolerance = r.num("dt_h2_tolerance", p.dt_h2_tolerance);
        p.probe_sizes = r.nums("probe_sizes", p.probe_sizes);
    }
    if (top.has("stochastic_sync")) {
        Reader r(top.raw("stochastic_sync"), "stochastic_sync");
        r.allow({"T_end", "final_ratio_max"});
        c.sync.T_end = r.num("T_end", c.sync.T_end);
        c.sync.final_ratio_max = r.num("final_ratio_max", c.sync.final_ratio_max);
    }
    c.validate();
    return c;
}

inline nlohmann::json parse_config_text(const std::string& text, bool toml_format) {
    if (toml_format) {
        try {
            const toml::table tbl = toml::parse(text);
            return config_detail::from_toml(tbl);
        } catch (const toml::parse_error& e) {
            std::ostringstream msg;
            msg << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
            throw ConfigError(msg.str());
        }
    }
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("JSON parse error: ") + e.what());
    }
}

/// .json files are read as JSON; everything else as TOML.
inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(parse_config_text(buf.str(), path.extension() != ".json"));
}

}  // namespace burgers_lab
