#pragma once

// Experiments for L1 contraction, exponential convergence, the pullback
// bounded trajectory and synchronization under random forcing.

#include "burgers_lab/linear_parabolic.hpp"
#include "burgers_lab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace burgers_lab {

// ---------------------------------------------------------------------------
// Contraction over one interval

enum class ContractionBranch { SmallPlusPart, SmallMinusPart, Harnack };

inline const char* to_string(ContractionBranch b) {
    switch (b) {
        case ContractionBranch::SmallPlusPart: return "small_plus_part";
        case ContractionBranch::SmallMinusPart: return "small_minus_part";
        case ContractionBranch::Harnack: return "harnack_branch";
    }
    return "?";
}

struct SplitPoint {
    double t = 0.0;
    double l1_plus = 0.0;
    double l1_minus = 0.0;
    double l1_diff = 0.0;  // |u(t) - v(t)|_1 from the nonlinear runs
};

struct ContractionReport {
    double T = 0.0;
    double w0_l1 = 0.0;
    double q_observed = 0.0;
    double theta_observed = 0.0;
    double theta_plus = 0.0;
    double theta_minus = 0.0;
    ContractionBranch branch = ContractionBranch::Harnack;
    double q_bound_from_theta = 1.0;
    bool certificate_holds = false;
    double max_split_error = 0.0;  // max_t |(w+ - w-) - (u - v)|_inf
    double max_imbalance = 0.0;    // max_t | |w+|_1 - |w-|_1 |
    double min_part_value = 0.0;   // lowest nodal value of w+ or w-
    double nonexpansion_violation = 0.0;
    std::vector<SplitPoint> split_series;
};

struct ContractionOptions {
    double threshold_fraction = 0.25;  // case split at max w+-(T/2) <= fraction * |w0|_1
    double midpoint_fraction = 0.5;    // case split time as a fraction of T
    LinearScheme scheme = LinearScheme::Spectral;
    int coefficient_order = 3;  // time interpolation of a between stored steps
};

/// Builds a(t, x) from two stored trajectories on a common time grid.
inline CoefficientPath coefficient_from_pair(const Trajectory& u, const Trajectory& v, const FluxModel& flux,
                                             int order = 1) {
    if (u.snapshots.size() != v.snapshots.size()) throw std::invalid_argument("trajectories are not aligned");
    std::vector<Field> a;
    a.reserve(u.snapshots.size());
    for (std::size_t i = 0; i < u.snapshots.size(); ++i) {
        if (std::abs(u.snapshot_times[i] - v.snapshot_times[i]) > 1e-9) {
            throw std::invalid_argument("trajectories are not aligned");
        }
        a.push_back(advection_coefficient(flux, v.snapshots[i], u.snapshots[i] - v.snapshots[i]));
    }
    return CoefficientPath(u.snapshot_times, std::move(a), order);
}

inline void require_equal_means(const Field& u0, const Field& v0) {
    u0.check_same_grid(v0);
    if (std::abs(mean_value(u0) - mean_value(v0)) > 1e-12) throw std::invalid_argument("mean mismatch");
}

inline ContractionReport contraction_experiment(const Field& u0, const Field& v0, const ForcingModel& fm,
                                                const FluxModel& flux, const SolverConfig& cfg, double T,
                                                const ContractionOptions& opt = {}) {
    require_equal_means(u0, v0);
    const Field w0 = u0 - v0;
    const double w0_l1 = norm(w0, NormKind::L1);
    if (w0_l1 == 0.0) throw std::invalid_argument("zero difference");

    SolverConfig c = cfg;
    c.record_stride = 1;
    c.snapshot_stride = 1;
    const Trajectory U = solve(u0, fm, flux, c, 0.0, T);
    const Trajectory V = solve(v0, fm, flux, c, 0.0, T);
    if (!U.completed() || !V.completed()) throw std::runtime_error("nonlinear run did not complete: " + U.message + V.message);
    const CoefficientPath coeff = coefficient_from_pair(U, V, flux, opt.coefficient_order);

    const double t_mid = opt.midpoint_fraction * T;
    const auto [wp0, wm0] = pos_neg_split(w0);
    // Two legs so that the case-split time is a step boundary.
    auto evolve = [&](const Field& x0) {
        Trajectory a = solve_linear(x0, coeff, c, 0.0, t_mid, opt.scheme);
        Trajectory b = solve_linear(a.final_state(), coeff, c, t_mid, T, opt.scheme);
        return std::pair{std::move(a), std::move(b)};
    };
    const auto [P1, P2] = evolve(wp0);
    const auto [M1, M2] = evolve(wm0);

    ContractionReport rep;
    rep.T = T;
    rep.w0_l1 = w0_l1;
    rep.q_observed = norm(U.final_state() - V.final_state(), NormKind::L1) / w0_l1;
    rep.min_part_value = std::numeric_limits<double>::infinity();

    auto scan = [&](const Trajectory& P, const Trajectory& M, bool skip_first) {
        for (std::size_t i = skip_first ? 1 : 0; i < P.snapshots.size(); ++i) {
            const double t = P.snapshot_times[i];
            const std::size_t k = U.snapshot_index(t, 1e-6 * c.dt);
            const Field diff = U.snapshots[k] - V.snapshots[k];
            const Field split = P.snapshots[i] - M.snapshots[i];
            rep.max_split_error = std::max(rep.max_split_error, norm(split - diff, NormKind::Linf));
            const double lp = norm(P.snapshots[i], NormKind::L1), lm = norm(M.snapshots[i], NormKind::L1);
            rep.max_imbalance = std::max(rep.max_imbalance, std::abs(lp - lm));
            rep.min_part_value = std::min({rep.min_part_value, min_value(P.snapshots[i]), min_value(M.snapshots[i])});
            rep.split_series.push_back({t, lp, lm, norm(diff, NormKind::L1)});
        }
    };
    scan(P1, M1, false);
    scan(P2, M2, true);

    double running = std::numeric_limits<double>::infinity();
    for (const SplitPoint& p : rep.split_series) {
        if (p.l1_diff > running) rep.nonexpansion_violation = std::max(rep.nonexpansion_violation, p.l1_diff - running);
        running = std::min(running, p.l1_diff);
    }

    const double threshold = opt.threshold_fraction * w0_l1;
    const double max_p_mid = max_value(P1.final_state()), max_m_mid = max_value(M1.final_state());
    rep.theta_plus = min_value(P2.final_state()) / max_p_mid;
    rep.theta_minus = min_value(M2.final_state()) / max_m_mid;
    rep.theta_observed = std::min(rep.theta_plus, rep.theta_minus);
    if (max_p_mid <= threshold) {
        rep.branch = ContractionBranch::SmallPlusPart;
    } else if (max_m_mid <= threshold) {
        rep.branch = ContractionBranch::SmallMinusPart;
    } else {
        rep.branch = ContractionBranch::Harnack;
    }
    rep.q_bound_from_theta = std::max(0.5, 1.0 - 0.5 * rep.theta_observed);
    const double bound = rep.branch == ContractionBranch::Harnack ? rep.q_bound_from_theta : 0.5;
    rep.certificate_holds = rep.q_observed <= bound + 1e-6;
    return rep;
}

/// |u(t) - v(t)|_1 at common snapshot times.
inline std::vector<std::pair<double, double>> l1_difference_series(const Trajectory& u, const Trajectory& v) {
    std::vector<std::pair<double, double>> out;
    const std::size_t count = std::min(u.snapshots.size(), v.snapshots.size());
    for (std::size_t i = 0; i < count; ++i) {
        out.emplace_back(u.snapshot_times[i], norm(u.snapshots[i] - v.snapshots[i], NormKind::L1));
    }
    return out;
}

/// max_t | |u - v|_1 - |u_c - v_c|_1 | for (u0 + c, v0 + c) evolved with f(. - c).
inline double mean_shift_discrepancy(const Field& u0, const Field& v0, const ForcingModel& fm,
                                     const FluxModel& flux, const SolverConfig& cfg, double T, double shift) {
    require_equal_means(u0, v0);
    const Trajectory U = solve(u0, fm, flux, cfg, 0.0, T), V = solve(v0, fm, flux, cfg, 0.0, T);
    const FluxModel moved = flux.shifted(shift);
    const Trajectory Us = solve(u0 + shift, fm, moved, cfg, 0.0, T), Vs = solve(v0 + shift, fm, moved, cfg, 0.0, T);
    const auto a = l1_difference_series(U, V), b = l1_difference_series(Us, Vs);
    if (a.size() != b.size()) throw std::runtime_error("shifted runs stored different snapshot counts");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i].second - b[i].second));
    return worst;
}

// ---------------------------------------------------------------------------
// Exponential fits

struct DecayFit {
    double gamma = 0.0;
    double C = 0.0;
    double r_squared = 0.0;
    double t_begin = 0.0;  // window actually used
    double t_end = 0.0;
    std::size_t points = 0;
};

/// Least squares line through (t, log v) on points of [t_lo, t_hi] with
/// v above max(floor, 10 eps).
inline DecayFit decay_rate_fit(std::span<const double> t, std::span<const double> v, double t_lo, double t_hi,
                               double floor = 0.0) {
    if (t.size() != v.size()) throw std::invalid_argument("series lengths differ");
    const double cut = std::max(floor, 10.0 * std::numeric_limits<double>::epsilon());
    std::vector<double> xs, ys;
    std::size_t in_window = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi) continue;
        ++in_window;
        if (v[i] > cut) {
            xs.push_back(t[i]);
            ys.push_back(std::log(v[i]));
        }
    }
    if (xs.size() < 5) {
        if (in_window >= 5 && xs.empty()) throw std::domain_error("underflowed decay");
        throw std::domain_error("too few positive points");
    }
    const double N = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= N;
    my /= N;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::domain_error("fit window has a single abscissa");
    const double slope = sxy / sxx;
    DecayFit fit;
    fit.gamma = -slope;
    fit.C = std::exp(my - slope * mx);
    // A flat series is fitted exactly.
    fit.r_squared = syy <= 1e-30 * std::max(1.0, my * my) ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
    fit.t_begin = xs.front();
    fit.t_end = xs.back();
    fit.points = xs.size();
    return fit;
}

inline DecayFit decay_rate_fit(const std::vector<std::pair<double, double>>& series, double t_lo, double t_hi,
                               double floor = 0.0) {
    std::vector<double> t, v;
    for (const auto& [a, b] : series) {
        t.push_back(a);
        v.push_back(b);
    }
    return decay_rate_fit(t, v, t_lo, t_hi, floor);
}

struct InterpolationCheck {
    double lhs = 0.0;        // ||u||_{H1}
    double rhs_ratio = 0.0;  // ||u||_{H1} / (||u||_{H2}^{3/5} |u|_1^{2/5})
};

inline InterpolationCheck interpolation_check(const Field& u) {
    const double l1 = norm(u, NormKind::L1);
    if (l1 == 0.0) throw std::invalid_argument("zero field");
    const SobolevParts p = sobolev_parts(spectrum_of(u), u.grid().n());
    InterpolationCheck out;
    out.lhs = p.h1();
    out.rhs_ratio = out.lhs / (std::pow(p.h2(), 0.6) * std::pow(l1, 0.4));
    return out;
}

// ---------------------------------------------------------------------------
// Pullback construction

struct PullbackResult {
    Trajectory v_traj;                // deepest run restricted to [-T_view, T_view]
    std::vector<double> gap_index;    // n
    std::vector<double> cauchy_gaps;  // g_n = sup_{|t| <= T_view} ||u^n(t) - u^{n+1}(t)||_{H1}
    double max_dt_h2 = 0.0;           // sup over the view window of ||v_t||_{H2}
};

/// u^n solves from t = -n with u^n(-n) = c, for n = 1..n_max + 1, so that
/// g_n exists for every n <= n_max. Snapshots are compared every
/// `compare_every` time units.
inline PullbackResult pullback_bounded_solution(double c, const ForcingModel& fm, const FluxModel& flux,
                                                const SolverConfig& cfg, int n_max, double T_view,
                                                double compare_every = 0.01) {
    if (n_max < 3) throw std::invalid_argument("n_max must be at least 3");
    if (!(T_view > 0.0)) throw std::invalid_argument("T_view must be positive");
    const int deepest = n_max + 1;
    if (fm.defined_from() > -deepest + 1e-12 || fm.defined_until() < T_view - 1e-9) {
        throw std::out_of_range("forcing window too short for the pullback construction");
    }
    const PeriodicGrid grid = PeriodicGrid::make(cfg.n);
    SolverConfig run_cfg = cfg;
    run_cfg.record_stride = 1;
    run_cfg.snapshot_stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(compare_every / cfg.dt)));

    std::vector<Trajectory> runs;
    for (int k = 1; k <= deepest; ++k) {
        Trajectory tr = solve(Field::constant(grid, c), fm, flux, run_cfg, -static_cast<double>(k), T_view);
        if (!tr.completed()) throw std::runtime_error("pullback run from t = -" + std::to_string(k) + " failed: " + tr.message);
        runs.push_back(tr.restricted(-T_view, T_view));
    }
    PullbackResult out;
    for (int k = 1; k <= n_max; ++k) {
        const Trajectory& a = runs[static_cast<std::size_t>(k - 1)];
        const Trajectory& b = runs[static_cast<std::size_t>(k)];
        double gap = 0.0;
        for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
            const Field& other = b.snapshots[b.snapshot_index(a.snapshot_times[i], 1e-6)];
            gap = std::max(gap, norm(a.snapshots[i] - other, NormKind::H1));
        }
        out.gap_index.push_back(k);
        out.cauchy_gaps.push_back(gap);
    }
    out.v_traj = runs.back();
    for (const NormRecord& r : out.v_traj.records) out.max_dt_h2 = std::max(out.max_dt_h2, r.dt_h2);
    return out;
}

/// Largest consecutive ratio g_{n+1} / g_n over n >= burn_in among gaps
/// above the floor; 0 if fewer than two such gaps exist.
inline double worst_gap_ratio(const std::vector<double>& gaps, std::size_t burn_in = 1, double floor = 1e-13) {
    double worst = 0.0;
    for (std::size_t i = burn_in; i + 1 < gaps.size(); ++i) {
        if (gaps[i] <= floor || gaps[i + 1] <= floor) continue;
        worst = std::max(worst, gaps[i + 1] / gaps[i]);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Uniqueness probe

struct ProbeResult {
    double size = 0.0;    // |p|_{H1}
    std::optional<DecayFit> fit;
    std::string marker;   // why no fit was produced
    std::vector<std::pair<double, double>> h1_series;
};

/// Perturbs the bounded trajectory at its first stored time and fits the
/// decay of ||u(t) - v(t)||_{H1} over the rest of its window.
inline std::vector<ProbeResult> uniqueness_probe(const Trajectory& v_traj, const std::vector<Field>& perturbations,
                                                 const SolverConfig& cfg, const FluxModel& flux,
                                                 const ForcingModel& fm, double floor = 1e-11) {
    std::vector<ProbeResult> out;
    for (const Field& p : perturbations) {
        if (std::abs(mean_value(p)) > 1e-12) throw std::invalid_argument("nonzero-mean perturbation");
    }
    const double t0 = v_traj.snapshot_times.front();
    const double t1 = v_traj.snapshot_times.back();
    SolverConfig c = cfg;
    c.snapshot_stride = v_traj.config.snapshot_stride;
    c.record_stride = v_traj.config.record_stride;
    for (const Field& p : perturbations) {
        ProbeResult r;
        r.size = norm(p, NormKind::H1);
        if (norm(p, NormKind::Linf) == 0.0) {
            r.marker = "zero difference";
            out.push_back(std::move(r));
            continue;
        }
        const Trajectory U = solve(v_traj.snapshots.front() + p, fm, flux, c, t0, t1);
        if (!U.completed()) {
            r.marker = "perturbed run failed: " + U.message;
            out.push_back(std::move(r));
            continue;
        }
        for (std::size_t i = 0; i < U.snapshots.size(); ++i) {
            const Field& vi = v_traj.snapshots[v_traj.snapshot_index(U.snapshot_times[i], 1e-6)];
            r.h1_series.emplace_back(U.snapshot_times[i], norm(U.snapshots[i] - vi, NormKind::H1));
        }
        try {
            r.fit = decay_rate_fit(r.h1_series, t0, t1, floor);
        } catch (const std::domain_error& e) {
            r.marker = e.what();
        }
        out.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Synchronization under random forcing

struct SyncReport {
    std::uint64_t seed = 0;
    double K_estimate = 0.0;
    double event_threshold = 0.0;  // 2 K + 1
    std::vector<double> event_times;
    std::vector<double> q_k;       // |w(t_k + 2)|_1 / |w(t_k + 1)|_1
    std::vector<std::pair<double, double>> l1_series;
    double initial_l1 = 0.0;
    double final_ratio = 0.0;
    double nonexpansion_violation = 0.0;
    bool nonincreasing = true;
};

struct SyncOptions {
    double dt_scan = 0.01;
    double store_every = 0.01;
};

inline SyncReport stochastic_sync_experiment(const Field& u0, const Field& v0, const StochasticSpec& spec,
                                             std::uint64_t seed, const SolverConfig& cfg, const FluxModel& flux,
                                             double T_end, const SyncOptions& opt = {}) {
    if (!(flux.sigma_floor() > 0.0)) throw std::invalid_argument("convexity required");
    require_equal_means(u0, v0);
    if (!(T_end >= 3.0)) throw std::invalid_argument("T_end must be at least 3");
    StochasticSpec s = spec;
    s.horizon = std::max(s.horizon, T_end);
    const ForcingModel fm = make_stochastic_forcing(s, seed);

    SyncReport rep;
    rep.seed = seed;
    const ForcingBudget budget = forcing_budget(fm, T_end, opt.dt_scan);
    rep.K_estimate = budget.K_estimate;
    rep.event_threshold = 2.0 * rep.K_estimate + 1.0;

    SolverConfig c = cfg;
    c.snapshot_stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(opt.store_every / cfg.dt)));
    const Trajectory U = solve(u0, fm, flux, c, 0.0, T_end);
    const Trajectory V = solve(v0, fm, flux, c, 0.0, T_end);
    if (!U.completed() || !V.completed()) throw std::runtime_error("synchronization run did not complete");
    rep.l1_series = l1_difference_series(U, V);
    rep.initial_l1 = rep.l1_series.front().second;
    rep.final_ratio = rep.initial_l1 > 0.0 ? rep.l1_series.back().second / rep.initial_l1 : 0.0;

    double running = std::numeric_limits<double>::infinity();
    for (const auto& [t, l1] : rep.l1_series) {
        if (l1 > running) rep.nonexpansion_violation = std::max(rep.nonexpansion_violation, l1 - running);
        running = std::min(running, l1);
    }
    rep.nonincreasing = rep.nonexpansion_violation <= 1e-9;

    // Greedy event detection on the scan grid.
    const auto scan = static_cast<std::size_t>(std::llround(T_end / opt.dt_scan));
    std::vector<double> h2(scan + 1);
    for (std::size_t i = 0; i <= scan; ++i) h2[i] = fm.h2_norm(static_cast<double>(i) * opt.dt_scan);
    const auto span2 = static_cast<std::size_t>(std::llround(2.0 / opt.dt_scan));
    auto l1_at = [&](double t) {
        const std::size_t i = U.snapshot_index(t, 1e-6);
        return rep.l1_series[i].second;
    };
    for (std::size_t i = 0; i + span2 <= scan;) {
        const double sup = *std::max_element(h2.begin() + static_cast<std::ptrdiff_t>(i),
                                             h2.begin() + static_cast<std::ptrdiff_t>(i + span2 + 1));
        if (sup <= rep.event_threshold) {
            const double tk = static_cast<double>(i) * opt.dt_scan;
            rep.event_times.push_back(tk);
            const double mid = l1_at(tk + 1.0);
            rep.q_k.push_back(mid > 0.0 ? l1_at(tk + 2.0) / mid : 0.0);
            i += span2;
        } else {
            ++i;
        }
    }
    return rep;
}

}  // namespace burgers_lab
