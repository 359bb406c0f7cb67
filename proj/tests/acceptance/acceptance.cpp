// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include "burgers_lab/checks.hpp"
#include "burgers_lab/linear_parabolic.hpp"
#include "burgers_lab/random_fields.hpp"
#include "burgers_lab/reference.hpp"
#include "burgers_lab/solver.hpp"
#include "burgers_lab/stability.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace burgers_lab;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

SolverConfig config(double nu, long n, double dt) {
    SolverConfig c;
    c.nu = nu;
    c.n = n;
    c.dt = dt;
    return c;
}

Field mode(const PeriodicGrid& g, double amp, int k = 1) {
    return sample(g, [=](double x) { return amp * std::sin(2 * pi * k * x); });
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Shared corpus for mean conservation and the max-principle bound.
struct CorpusCase {
    Field u0;
    ForcingModel fm;
    FluxModel flux;
    SolverConfig cfg;
    double T;
};

std::vector<CorpusCase> regression_corpus() {
    std::vector<CorpusCase> out;
    for (int i = 0; i < 50; ++i) {
        std::mt19937_64 rng(derive_seed(3000, static_cast<std::uint64_t>(i)));
        std::uniform_real_distribution<double> U(0.0, 1.0);
        const long n = (i % 2) ? 128 : 64;
        const PeriodicGrid g = make_grid(n);
        Field u0 = random_bandlimited(g, 1 + i % 6, 1.0 + U(rng), 0.2 + 2.0 * U(rng), rng) + (2.0 * U(rng) - 1.0);
        FluxModel flux = FluxModel::quadratic();
        switch (i % 4) {
            case 0: flux = FluxModel::zero(); break;
            case 1: flux = FluxModel::linear(4.0 * U(rng) - 2.0); break;
            case 2: flux = FluxModel::polynomial({0.0, U(rng) - 0.5, 0.5, 0.1 * U(rng)}); break;
            default: break;
        }
        ForcingModel fm = ForcingModel::zero();
        switch ((i / 4) % 4) {
            case 1: fm = ForcingModel::steady(random_bandlimited(g, 3, 1.0, 2.0 * U(rng), rng)); break;
            case 2:
                fm = ForcingModel::time_periodic({random_bandlimited(g, 3, 1.0, U(rng), rng),
                                                  random_bandlimited(g, 3, 1.0, U(rng), rng)},
                                                 0.5 + U(rng));
                break;
            case 3: {
                StochasticSpec s;
                s.horizon = 1.0;
                s.amplitude = 2.0 * U(rng);
                fm = make_stochastic_forcing(s, derive_seed(3001, static_cast<std::uint64_t>(i)));
                break;
            }
            default: break;
        }
        SolverConfig cfg = config(0.05 + 0.15 * U(rng), n, 1e-3);
        if (i % 5 == 4) cfg.scheme = Scheme::CN_AB2;
        out.push_back({std::move(u0), std::move(fm), std::move(flux), cfg, 1.0});
    }
    return out;
}

const std::vector<Trajectory>& corpus_runs() {
    static const std::vector<Trajectory> runs = [] {
        std::vector<Trajectory> r;
        for (const CorpusCase& c : regression_corpus()) r.push_back(solve(c.u0, c.fm, c.flux, c.cfg, 0.0, c.T));
        return r;
    }();
    return runs;
}

// ---------------------------------------------------------------------------

Outcome heat_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto g = make_grid(128);
    const Trajectory tr = solve(mode(g, 1.0), ForcingModel::zero(), FluxModel::zero(), config(0.1, 128, 1e-3), 0.0, 1.0);
    const double err = norm(tr.final_state() - mode(g, std::exp(-4 * pi * pi * 0.1)), NormKind::Linf);
    const double secs = seconds_since(t0);
    return {tr.completed() && err < 1e-6 && secs < 1.0,
            "sup error " + fmt("%.3e", err) + " (< 1e-6), " + fmt("%.2f", secs) + " s (< 1 s)"};
}

Outcome cole_hopf_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto g = make_grid(256);
    const Field u0 = sample(g, [](double x) { return -0.5 * std::sin(2 * pi * x); });
    const Trajectory tr = solve(u0, ForcingModel::zero(), FluxModel::quadratic(), config(0.05, 256, 1e-3), 0.0, 0.5);
    const reference::ColeHopf ref(u0, 0.05, 1024);
    double err = 0.0;
    for (std::size_t i = 0; i < tr.snapshots.size(); i += 50) {
        err = std::max(err, norm(tr.snapshots[i] - ref.at(tr.snapshot_times[i], g), NormKind::Linf));
    }
    err = std::max(err, norm(tr.final_state() - ref.at(0.5, g), NormKind::Linf));
    const double secs = seconds_since(t0);
    return {tr.completed() && err < 1e-4 && secs < 30.0,
            "Linf error " + fmt("%.3e", err) + " (< 1e-4), " + fmt("%.2f", secs) + " s (< 30 s)"};
}

Outcome mean_conservation() {
    double worst = 0.0;
    bool completed = true;
    for (const Trajectory& tr : corpus_runs()) {
        completed = completed && tr.completed();
        const double m0 = tr.records.front().mean;
        for (const NormRecord& r : tr.records) worst = std::max(worst, std::abs(r.mean - m0));
        worst = std::max(worst, std::abs(mean_value(tr.initial_state()) - m0));
    }
    return {completed && worst < 1e-10, "50 cases, max mean drift " + fmt("%.3e", worst) + " (< 1e-10)"};
}

Outcome max_principle() {
    const auto cases = regression_corpus();
    const auto& runs = corpus_runs();
    int failures = 0;
    double min_margin = 1e300;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const double h_linf = forcing_sup_norm(cases[i].fm, 0.0, cases[i].T, runs[i].grid);
        const LinfBoundResult r = check_linf_bound(runs[i], h_linf, 1e-8);
        if (!r.holds) ++failures;
        min_margin = std::min(min_margin, r.margin);
    }
    return {failures == 0, std::to_string(failures) + " violations over 50 cases, min margin " + fmt("%.3e", min_margin)};
}

Outcome energy_identity() {
    const auto g = make_grid(128);
    const Trajectory heat = solve(mode(g, 1.0), ForcingModel::zero(), FluxModel::zero(), config(0.1, 128, 1e-4), 0.0, 1.0);
    const double r_heat = max_abs_residual(energy_identity_residual(heat));
    const Field u0 = mode(g, -0.5);
    const double r1 = max_abs_residual(energy_identity_residual(
        solve(u0, ForcingModel::zero(), FluxModel::quadratic(), config(0.05, 128, 1e-3), 0.0, 0.5)));
    const double r2 = max_abs_residual(energy_identity_residual(
        solve(u0, ForcingModel::zero(), FluxModel::quadratic(), config(0.05, 128, 5e-4), 0.0, 0.5)));
    const bool ok = r_heat < 1e-5 && r1 < 1e-5 && r2 < 1e-5 && r1 / r2 >= 3.5;
    return {ok, "heat " + fmt("%.2e", r_heat) + ", Cole-Hopf " + fmt("%.2e", r1) + " -> " + fmt("%.2e", r2) +
                    " (ratio " + fmt("%.2f", r1 / r2) + " >= 3.5)"};
}

Outcome l1_nonexpansion() {
    const auto g = make_grid(128);
    int violations = 0;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        std::mt19937_64 rng(5000 + i);
        const Field w0 = random_bandlimited(g, 6, 1.0, 1.0, rng);
        const double rho = std::uniform_real_distribution<double>(0.0, 5.0)(rng);
        const CoefficientPath a = random_coefficient_path(g, rho, 0.0, 1.0, 0.01, rng);
        const Trajectory tr = solve_linear(w0, a, config(0.1, 128, 1e-3), 0.0, 1.0, LinearScheme::Spectral);
        const NonExpansionResult r = l1_nonexpansion_check(tr, 1e-9);
        if (!r.holds || !tr.completed()) ++violations;
        worst = std::max(worst, r.worst_violation);
    }
    return {violations == 0, "100 runs, " + std::to_string(violations) + " violations, worst " + fmt("%.2e", worst)};
}

Outcome harnack_positivity() {
    const auto t0 = std::chrono::steady_clock::now();
    ThetaSweepOptions opt;
    opt.nu = 0.1;
    opt.T_prime = 0.5;
    opt.T = 1.0;
    opt.trial_count = 50;
    const auto rows = theta_sweep({0.0, 1.0, 5.0}, opt);
    bool ok = true;
    std::string d;
    for (const auto& row : rows) {
        for (double th : row.thetas) ok = ok && th > 0.0;
        ok = ok && row.trials == 50;
        d += "rho " + fmt("%g", row.rho) + ": min " + fmt("%.3f", row.theta_min) + ", ";
    }
    const double secs = seconds_since(t0);
    return {ok && secs < 300.0, d + fmt("%.1f", secs) + " s (< 5 min)"};
}

struct PairRuns {
    std::vector<ContractionReport> reports;
    double consistency = 0.0;
};

const PairRuns& pair_runs() {
    static const PairRuns runs = [] {
        PairRuns p;
        const auto g = make_grid(512);
        const auto cfg = config(0.1, 512, 2.5e-4);
        for (int i = 0; i < 20; ++i) {
            std::mt19937_64 rng(1000 + i);
            const Field u0 = random_bandlimited(g, 4, 2.0, 1.0, rng);
            const Field v0 = u0 - random_bandlimited(g, 4, 2.0, 1.0, rng);
            p.reports.push_back(contraction_experiment(u0, v0, ForcingModel::zero(), FluxModel::quadratic(), cfg, 1.0));
            if (i < 10) {
                // Direct check: the linear equation with the averaged coefficient carries u0 - v0 to u - v.
                const Trajectory U = solve(u0, ForcingModel::zero(), FluxModel::quadratic(), cfg, 0.0, 1.0);
                const Trajectory V = solve(v0, ForcingModel::zero(), FluxModel::quadratic(), cfg, 0.0, 1.0);
                const CoefficientPath a = coefficient_from_pair(U, V, FluxModel::quadratic(), 3);
                const Trajectory W = solve_linear(u0 - v0, a, cfg, 0.0, 1.0);
                for (std::size_t k = 0; k < W.snapshots.size(); ++k) {
                    p.consistency = std::max(p.consistency,
                                             norm(W.snapshots[k] - (U.snapshots[k] - V.snapshots[k]), NormKind::Linf));
                }
            }
        }
        return p;
    }();
    return runs;
}

Outcome strict_contraction() {
    double worst_q = 0.0, worst_gap = -1.0;
    int harnack = 0;
    bool ok = true;
    for (const ContractionReport& r : pair_runs().reports) {
        worst_q = std::max(worst_q, r.q_observed);
        ok = ok && r.q_observed < 1.0;
        if (r.branch == ContractionBranch::Harnack) {
            ++harnack;
            worst_gap = std::max(worst_gap, r.q_observed - r.q_bound_from_theta);
            ok = ok && r.q_observed <= r.q_bound_from_theta + 1e-6;
        }
    }
    return {ok, "20 pairs, max q " + fmt("%.4f", worst_q) + ", " + std::to_string(harnack) +
                    " on the Harnack branch, max q - bound " + fmt("%.4f", worst_gap)};
}

Outcome linear_consistency() {
    const double c = pair_runs().consistency;
    return {c < 1e-6, "10 cases, max Linf mismatch " + fmt("%.3e", c) + " (< 1e-6)"};
}

Outcome exponential_decay() {
    const auto g = make_grid(512);
    SolverConfig cfg = config(0.02, 512, 1e-3);
    cfg.record_stride = 50;
    cfg.snapshot_stride = 50;
    const ForcingModel fm = ForcingModel::steady(
        sample(g, [](double x) { return 0.1 * (std::sin(2 * pi * x) + 0.5 * std::cos(4 * pi * x)); }));
    const Trajectory V = solve(Field(g), fm, FluxModel::quadratic(), cfg, 0.0, 20.0);
    bool ok = V.completed();
    double lo = 1e300, hi = 0.0;
    std::string d;
    for (double R : {0.1, 1.0, 10.0}) {
        const Field u0 = sample(g, [R](double x) {
            return R * (std::sin(2 * pi * x) + 0.3 * std::cos(6 * pi * x + 1.0)) / 0.7;
        });
        const Trajectory U = solve(u0, fm, FluxModel::quadratic(), cfg, 0.0, 20.0);
        ok = ok && U.completed();
        try {
            const DecayFit f = decay_rate_fit(l1_difference_series(U, V), 1.0, 20.0);
            ok = ok && f.gamma > 0.0 && f.r_squared > 0.99 && f.t_end > 19.9;
            lo = std::min(lo, f.gamma);
            hi = std::max(hi, f.gamma);
            d += "R " + fmt("%g", R) + ": gamma " + fmt("%.3f", f.gamma) + " r2 " + fmt("%.5f", f.r_squared) + ", ";
        } catch (const std::exception& e) {
            ok = false;
            d += "R " + fmt("%g", R) + ": " + e.what() + ", ";
        }
    }
    ok = ok && hi > 0.0 && hi / lo <= 3.0;
    return {ok, d + "spread " + fmt("%.3f", hi / lo) + " (<= 3)"};
}

Outcome pullback() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto g = make_grid(128);
    const ForcingModel fm = ForcingModel::steady(mode(g, 0.5));
    const PullbackResult r = pullback_bounded_solution(0.0, fm, FluxModel::quadratic(), config(0.1, 128, 1e-3), 8, 1.0);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < r.cauchy_gaps.size(); ++k) {
        if (r.gap_index[k] >= 2) pts.emplace_back(r.gap_index[k], r.cauchy_gaps[k]);
    }
    bool ok = true;
    double ratio = 1.0;
    try {
        const DecayFit f = decay_rate_fit(pts, 2.0, 8.0, 1e-14);
        ratio = std::exp(-f.gamma);
        ok = f.points == 7 && ratio < 1.0;
    } catch (const std::exception&) {
        ok = false;
    }
    const double secs = seconds_since(t0);
    ok = ok && r.max_dt_h2 < 1e-5 && secs < 120.0;
    return {ok, "fitted gap ratio " + fmt("%.4f", ratio) + " on n = 2..8, sup ||v_t||_2 " + fmt("%.2e", r.max_dt_h2) +
                    " (< 1e-5), " + fmt("%.1f", secs) + " s (< 2 min)"};
}

Outcome stochastic_sync() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto g = make_grid(128);
    StochasticSpec spec;
    spec.modes = 8;
    spec.decay_p = 3.0;
    spec.lambda = 1.0;
    bool ok = true;
    double worst_ratio = 0.0, worst_nonexp = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        std::mt19937_64 rng(seed);
        const Field u0 = random_bandlimited(g, 4, 2.0, 1.0, rng);
        const SyncReport r =
            stochastic_sync_experiment(u0, Field(g), spec, seed, config(0.1, 128, 1e-3), FluxModel::quadratic(), 50.0);
        ok = ok && r.final_ratio < 1e-3 && r.nonincreasing;
        worst_ratio = std::max(worst_ratio, r.final_ratio);
        worst_nonexp = std::max(worst_nonexp, r.nonexpansion_violation);
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < 600.0;
    return {ok, "10 seeds, max final ratio " + fmt("%.3e", worst_ratio) + " (< 1e-3), max increase " +
                    fmt("%.1e", worst_nonexp) + ", " + fmt("%.1f", secs) + " s (< 10 min)"};
}

Outcome mean_shift() {
    const auto g = make_grid(128);
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        std::mt19937_64 rng(7000 + i);
        const Field u0 = random_bandlimited(g, 4, 2.0, 1.0, rng);
        const Field v0 = random_bandlimited(g, 4, 2.0, 1.0, rng);
        const ForcingModel fm = ForcingModel::steady(random_bandlimited(g, 3, 1.0, 0.5, rng));
        const double c = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
        worst = std::max(worst,
                         mean_shift_discrepancy(u0, v0, fm, FluxModel::quadratic(), config(0.1, 128, 1e-3), 1.0, c));
    }
    return {worst < 1e-9, "5 cases, max | |u - v|_1 change | " + fmt("%.3e", worst) + " (< 1e-9)"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"heat oracle", heat_oracle},
        {"Cole-Hopf oracle", cole_hopf_oracle},
        {"mean conservation", mean_conservation},
        {"maximum-principle bound", max_principle},
        {"energy identity", energy_identity},
        {"L1 non-expansion", l1_nonexpansion},
        {"Harnack positivity", harnack_positivity},
        {"strict contraction", strict_contraction},
        {"linear/nonlinear consistency", linear_consistency},
        {"exponential decay", exponential_decay},
        {"pullback construction", pullback},
        {"stochastic synchronization", stochastic_sync},
        {"mean-shift covariance", mean_shift},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
