#pragma once

// Configured experiments: each one runs, writes its artifacts under an output
// directory and returns a JSON report with a list of failed assertions.

#include "burgers_lab/checks.hpp"
#include "burgers_lab/config.hpp"
#include "burgers_lab/io.hpp"
#include "burgers_lab/linear_parabolic.hpp"
#include "burgers_lab/parallel.hpp"
#include "burgers_lab/reference.hpp"
#include "burgers_lab/solver.hpp"
#include "burgers_lab/stability.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace burgers_lab {

struct CatalogEntry {
    ExperimentKind kind;
    const char* anchor;
    const char* summary;
};

inline const std::vector<CatalogEntry>& experiment_catalog() {
    static const std::vector<CatalogEntry> entries{
        {ExperimentKind::Oracle, "Theorem 2.1",
         "solver against heat, advection-diffusion and Cole-Hopf solutions; mean, max-principle and energy checks"},
        {ExperimentKind::Dissipativity, "Theorem 2.2",
         "absorbing-window bound for small and large data, H2 bound after entry, one-sided Linf decay"},
        {ExperimentKind::HarnackSweep, "Proposition 2.5",
         "Harnack ratio theta over random nonnegative data and coefficients; L1 non-expansion corpus"},
        {ExperimentKind::Contraction, "Theorem 3.1",
         "strict L1 contraction over one unit of time via the w+/w- split; exponential decay of |u - v|_1"},
        {ExperimentKind::Pullback, "Theorem 4.1",
         "bounded trajectory by pullback from t = -n; geometric Cauchy gaps; perturbation decay"},
        {ExperimentKind::StochasticSync, "Theorem 4.3",
         "synchronization of two solutions driven by the same Ornstein-Uhlenbeck force"},
        {ExperimentKind::FullSuite, "all of the above", "every experiment with its default corpus and a summary table"},
    };
    return entries;
}

inline std::string catalog_text() {
    std::ostringstream o;
    for (const auto& e : experiment_catalog()) {
        o << to_string(e.kind) << " → " << e.anchor << "\n";
        o << "    " << e.summary << "\n";
    }
    return o.str();
}

struct RunContext {
    std::filesystem::path out_dir;
    std::size_t threads = 1;
    std::string stamp;            // non-empty only with --stamp; goes into plots only
    std::ostream* log = nullptr;  // progress lines
};

struct ExperimentResult {
    std::string name;
    nlohmann::json report;
    std::vector<std::string> failures;
    nlohmann::json summary_rows = nlohmann::json::array();  // {case, q, gamma, theta} rows
    bool passed() const { return failures.empty(); }
};

namespace exp_detail {

using nlohmann::json;
namespace fs = std::filesystem;

/// Collects named assertions; a failed one also lands in the failure list.
class Checks {
public:
    void expect(const std::string& name, bool ok, double value, double limit, const std::string& relation) {
        json entry{{"passed", ok}, {"value", io::number(value)}, {"limit", io::number(limit)}, {"relation", relation}};
        checks_[name] = entry;
        if (!ok) {
            std::ostringstream msg;
            msg << name << ": " << io::format_double(value) << " violates " << relation << " "
                << io::format_double(limit);
            failures_.push_back(msg.str());
        }
    }
    void fail(const std::string& name, const std::string& detail) {
        checks_[name] = json{{"passed", false}, {"detail", detail}};
        failures_.push_back(name + ": " + detail);
    }
    const json& table() const { return checks_; }
    const std::vector<std::string>& failures() const { return failures_; }

private:
    json checks_ = json::object();
    std::vector<std::string> failures_;
};

inline void log_line(const RunContext& ctx, const std::string& s) {
    if (ctx.log) *ctx.log << s << std::endl;
}

inline json solver_json(const SolverConfig& c) {
    return json{{"nu", c.nu},         {"n", c.n},
                {"dt", c.dt},         {"scheme", to_string(c.scheme)},
                {"dealias", c.dealias}, {"cfl_safety", c.cfl_safety},
                {"record_stride", c.record_stride}, {"snapshot_stride", c.snapshot_stride}};
}

inline io::PlotOptions plot_opts(const RunContext& ctx, std::string title, std::string y, bool log_y) {
    io::PlotOptions o;
    o.title = std::move(title);
    o.y_label = std::move(y);
    o.log_y = log_y;
    o.stamp = ctx.stamp;
    return o;
}

inline ExperimentResult finish(const std::string& name, const ExperimentConfig& cfg, const RunContext& ctx,
                               const Checks& checks, json results, json summary_rows) {
    ExperimentResult r;
    r.name = name;
    r.failures = checks.failures();
    r.summary_rows = std::move(summary_rows);
    r.report = json{{"experiment", name},
                    {"schema_version", cfg.schema_version},
                    {"solver", solver_json(cfg.solver)},
                    {"seeds", cfg.seeds},
                    {"passed", r.failures.empty()},
                    {"failures", r.failures},
                    {"checks", checks.table()},
                    {"results", std::move(results)}};
    io::write_json(ctx.out_dir / "report.json", r.report);
    return r;
}

/// Short form for case names; values in reports keep full precision.
inline std::string label_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline double mean_drift(const Trajectory& traj) {
    double worst = 0.0;
    const double m0 = traj.records.front().mean;
    for (const NormRecord& r : traj.records) worst = std::max(worst, std::abs(r.mean - m0));
    return worst;
}

// ---------------------------------------------------------------------------

inline ExperimentResult run_oracle(const ExperimentConfig& cfg, const RunContext& ctx) {
    const SolverConfig& sc = cfg.solver;
    const PeriodicGrid grid = PeriodicGrid::make(sc.n);
    const Field u0 = cfg.initial.build(grid, cfg.seeds.front());
    const FluxModel flux = cfg.flux.build();
    const ForcingModel fm = ForcingModel::zero();
    const double T = cfg.oracle.T;
    const bool cole_hopf = cfg.flux.kind == "quadratic";
    const double tol = cfg.oracle.tolerance.value_or(cole_hopf ? 1e-4 : 1e-6);
    log_line(ctx, std::string("oracle: ") + (cole_hopf ? "Cole-Hopf" : "linear") + " reference, n = " +
                      std::to_string(sc.n));

    const Trajectory traj = solve(u0, fm, flux, sc, 0.0, T);
    Checks checks;
    json results;
    results["status"] = to_string(traj.status);
    if (!traj.completed()) {
        checks.fail("run_completed", traj.message);
        return finish("oracle", cfg, ctx, checks, results, json::array());
    }

    std::optional<reference::ColeHopf> ch;
    if (cole_hopf) ch.emplace(u0, sc.nu);
    auto exact = [&](double t) {
        if (ch) return ch->at(t, grid);
        const double speed = cfg.flux.kind == "linear" ? cfg.flux.speed : 0.0;
        return reference::advection_diffusion(u0, speed, sc.nu, t);
    };
    io::CsvTable err({"t", "linf_error"});
    io::PlotSeries err_plot{"|u - u_ref|_inf", {}, {}};
    double sup_error = 0.0;
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        const double e = norm(traj.snapshots[i] - exact(traj.snapshot_times[i]), NormKind::Linf);
        sup_error = std::max(sup_error, e);
        err.add_row({traj.snapshot_times[i], e});
        err_plot.x.push_back(traj.snapshot_times[i]);
        err_plot.y.push_back(e);
    }
    const double final_error = norm(traj.final_state() - exact(traj.t_end), NormKind::Linf);
    const double drift = mean_drift(traj);
    const LinfBoundResult lb = check_linf_bound(traj, 0.0);
    const double residual = traj.records.size() >= 3 ? max_abs_residual(energy_identity_residual(traj)) : 0.0;

    checks.expect("sup_error", sup_error < tol, sup_error, tol, "<");
    checks.expect("mean_drift", drift < 1e-10, drift, 1e-10, "<");
    checks.expect("linf_bound_margin", lb.holds, lb.margin, -1e-8, ">=");

    results["reference"] = ch ? "cole_hopf" : "advection_diffusion";
    results["sup_error"] = sup_error;
    results["final_error"] = final_error;
    results["mean_drift"] = drift;
    results["linf_bound"] = json{{"lhs", lb.lhs}, {"rhs", lb.rhs}, {"margin", lb.margin}};
    results["energy_residual_max"] = residual;
    results["substeps"] = traj.substeps;

    io::norms_table(traj).write(ctx.out_dir / "norms.csv");
    err.write(ctx.out_dir / "error.csv");
    io::write_snapshots(ctx.out_dir / "snapshots.bin", traj);
    io::write_svg(ctx.out_dir / "error.svg", {err_plot}, plot_opts(ctx, "oracle error", "error", true));
    return finish("oracle", cfg, ctx, checks, results, json::array());
}

// ---------------------------------------------------------------------------

inline Field decay_pair_data(const PeriodicGrid& grid, double R) {
    std::vector<double> v(grid.n());
    for (std::size_t j = 0; j < grid.n(); ++j) {
        const double x = grid.node(j);
        v[j] = R * (std::sin(2.0 * std::numbers::pi * x) + 0.3 * std::cos(6.0 * std::numbers::pi * x + 1.0)) / 0.7;
    }
    return Field(grid, std::move(v));
}

inline ExperimentResult run_contraction(const ExperimentConfig& cfg, const RunContext& ctx) {
    const ContractionParams& p = cfg.contraction;
    const SolverConfig& sc = cfg.solver;
    const PeriodicGrid grid = PeriodicGrid::make(sc.n);
    const FluxModel flux = cfg.flux.build();
    const ForcingModel fm = cfg.forcing.build(grid, cfg.seeds.front());
    ContractionOptions opt;
    opt.coefficient_order = p.coefficient_order;

    const std::size_t pairs = cfg.seeds.size();
    log_line(ctx, "contraction: " + std::to_string(pairs) + " pairs, n = " + std::to_string(sc.n));
    std::vector<ContractionReport> reps(pairs);
    std::vector<std::string> errors(pairs);
    parallel_for(pairs, ctx.threads, [&](std::size_t i) {
        std::mt19937_64 rng(cfg.seeds[i]);
        const Field u0 = random_bandlimited(grid, p.modes, p.decay, p.R, rng);
        const Field d = random_bandlimited(grid, p.modes, p.decay, p.R, rng);
        try {
            reps[i] = contraction_experiment(u0, u0 - d, fm, flux, sc, p.T, opt);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    Checks checks;
    json results, rows = json::array(), summary = json::array();
    io::CsvTable table({"seed", "q_observed", "theta_observed", "theta_plus", "theta_minus", "harnack_branch",
                        "q_bound", "max_split_error", "max_imbalance", "min_part_value", "nonexpansion_violation"});
    double worst_q = 0.0, worst_split = 0.0, worst_cert_gap = -1.0, worst_nonexp = 0.0;
    bool all_certified = true;
    for (std::size_t i = 0; i < pairs; ++i) {
        const std::string tag = "pair_" + std::to_string(cfg.seeds[i]);
        if (!errors[i].empty()) {
            checks.fail(tag, errors[i]);
            continue;
        }
        const ContractionReport& r = reps[i];
        worst_q = std::max(worst_q, r.q_observed);
        worst_split = std::max(worst_split, r.max_split_error);
        worst_nonexp = std::max(worst_nonexp, r.nonexpansion_violation);
        all_certified = all_certified && r.certificate_holds;
        if (r.branch == ContractionBranch::Harnack) {
            worst_cert_gap = std::max(worst_cert_gap, r.q_observed - r.q_bound_from_theta);
        }
        table.add_row({static_cast<double>(cfg.seeds[i]), r.q_observed, r.theta_observed, r.theta_plus,
                       r.theta_minus, r.branch == ContractionBranch::Harnack ? 1.0 : 0.0, r.q_bound_from_theta,
                       r.max_split_error, r.max_imbalance, r.min_part_value, r.nonexpansion_violation});
        rows.push_back(json{{"seed", cfg.seeds[i]},
                            {"q_observed", r.q_observed},
                            {"theta_observed", r.theta_observed},
                            {"branch", to_string(r.branch)},
                            {"q_bound_from_theta", r.q_bound_from_theta},
                            {"certificate_holds", r.certificate_holds},
                            {"max_split_error", r.max_split_error},
                            {"max_imbalance", r.max_imbalance},
                            {"min_part_value", r.min_part_value}});
        summary.push_back(json{{"case", "contraction seed " + std::to_string(cfg.seeds[i])},
                               {"q", r.q_observed},
                               {"theta", r.theta_observed}});
    }
    checks.expect("max_q_observed", worst_q < 1.0, worst_q, 1.0, "<");
    if (!all_certified) checks.fail("certificate", "at least one pair violates its contraction certificate");
    if (worst_cert_gap > -1.0) {
        checks.expect("harnack_branch_q_minus_bound", worst_cert_gap <= 1e-6, worst_cert_gap, 1e-6, "<=");
    }
    checks.expect("max_split_error", worst_split < p.split_tolerance, worst_split, p.split_tolerance, "<");
    checks.expect("nonexpansion_violation", worst_nonexp <= 1e-9, worst_nonexp, 1e-9, "<=");
    results["pairs"] = rows;
    table.write(ctx.out_dir / "contraction_pairs.csv");

    if (p.decay_fit) {
        log_line(ctx, "contraction: decay fits for " + std::to_string(p.decay_sizes.size()) + " sizes");
        SolverConfig dc = sc;
        dc.nu = p.decay_nu;
        dc.n = p.decay_n;
        dc.dt = p.decay_dt;
        dc.record_stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.05 / dc.dt)));
        dc.snapshot_stride = dc.record_stride;
        const PeriodicGrid dg = PeriodicGrid::make(dc.n);
        const ForcingModel dfm = ForcingModel::steady(p.decay_forcing.build(dg, 0));
        const std::size_t m = p.decay_sizes.size();
        std::vector<std::vector<std::pair<double, double>>> series(m);
        std::vector<std::string> errs(m);
        parallel_for(m, ctx.threads, [&](std::size_t k) {
            const Field u0 = decay_pair_data(dg, p.decay_sizes[k]);
            const Trajectory U = solve(u0, dfm, flux, dc, 0.0, p.fit_t_hi);
            const Trajectory V = solve(Field::constant(dg, 0.0), dfm, flux, dc, 0.0, p.fit_t_hi);
            if (!U.completed() || !V.completed()) {
                errs[k] = "decay run did not complete";
                return;
            }
            series[k] = l1_difference_series(U, V);
        });
        json fits = json::array();
        double g_lo = std::numeric_limits<double>::infinity(), g_hi = 0.0;
        std::vector<io::PlotSeries> plot;
        for (std::size_t k = 0; k < m; ++k) {
            const std::string tag = "decay_R_" + label_number(p.decay_sizes[k]);
            if (!errs[k].empty()) {
                checks.fail(tag, errs[k]);
                continue;
            }
            io::CsvTable t({"t", "l1_difference"});
            io::PlotSeries ps{"R = " + label_number(p.decay_sizes[k]), {}, {}};
            for (const auto& [tt, v] : series[k]) {
                t.add_row({tt, v});
                ps.x.push_back(tt);
                ps.y.push_back(v);
            }
            t.write(ctx.out_dir / ("decay_R" + std::to_string(k) + ".csv"));
            plot.push_back(std::move(ps));
            try {
                const DecayFit f = decay_rate_fit(series[k], p.fit_t_lo, p.fit_t_hi);
                checks.expect(tag + "_gamma", f.gamma > 0.0, f.gamma, 0.0, ">");
                checks.expect(tag + "_r_squared", f.r_squared > 0.99, f.r_squared, 0.99, ">");
                g_lo = std::min(g_lo, f.gamma);
                g_hi = std::max(g_hi, f.gamma);
                fits.push_back(json{{"R", p.decay_sizes[k]},
                                    {"gamma", f.gamma},
                                    {"C", f.C},
                                    {"r_squared", f.r_squared},
                                    {"t_begin", f.t_begin},
                                    {"t_end", f.t_end},
                                    {"points", f.points}});
                summary.push_back(json{{"case", "decay R = " + label_number(p.decay_sizes[k])},
                                       {"gamma", f.gamma}});
            } catch (const std::exception& e) {
                checks.fail(tag, e.what());
            }
        }
        if (g_hi > 0.0 && g_lo > 0.0 && m > 1) {
            checks.expect("gamma_spread", g_hi / g_lo <= 3.0, g_hi / g_lo, 3.0, "<=");
        }
        results["decay_fits"] = fits;
        io::write_svg(ctx.out_dir / "decay.svg", plot, plot_opts(ctx, "|u - v|_1 under steady forcing", "|u - v|_1", true));
    }
    return finish("contraction", cfg, ctx, checks, results, summary);
}

// ---------------------------------------------------------------------------

inline ExperimentResult run_dissipativity(const ExperimentConfig& cfg, const RunContext& ctx) {
    const DissipativityParams& p = cfg.dissipativity;
    SolverConfig sc = cfg.solver;
    sc.record_stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.005 / sc.dt)));
    sc.snapshot_stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.05 / sc.dt)));
    const PeriodicGrid grid = PeriodicGrid::make(sc.n);
    const FluxModel flux = cfg.flux.build();
    const ForcingModel fm = cfg.forcing.build(grid, cfg.seeds.front());
    const double h_linf = forcing_sup_norm(fm, 0.0, p.T, grid);
    log_line(ctx, "dissipativity: " + std::to_string(p.sizes.size()) + " sizes, T = " + label_number(p.T));

    const std::size_t m = p.sizes.size();
    std::vector<Trajectory> runs(m);
    parallel_for(m, ctx.threads, [&](std::size_t k) {
        std::vector<double> v(grid.n());
        for (std::size_t j = 0; j < grid.n(); ++j) {
            v[j] = cfg.initial.mean +
                   p.sizes[k] * std::numbers::sqrt2 * std::sin(2.0 * std::numbers::pi * grid.node(j) + 0.3);
        }
        runs[k] = solve(Field(grid, std::move(v)), fm, flux, sc, 0.0, p.T);
    });

    Checks checks;
    json results, cases = json::array(), summary = json::array();
    double c_lo = std::numeric_limits<double>::infinity(), c_hi = 0.0;
    std::vector<io::PlotSeries> plot;
    double prev_entry = -1.0;
    for (std::size_t k = 0; k < m; ++k) {
        const std::string tag = "size_" + label_number(p.sizes[k]);
        const Trajectory& tr = runs[k];
        if (!tr.completed()) {
            checks.fail(tag, tr.message);
            continue;
        }
        const DissipativityReport rep = dissipativity_report(tr, sc, h_linf);
        const H2BoundResult h2 = h2_bound_check(tr, rep.entry_time);
        const LinfBoundResult lb = check_linf_bound(tr, h_linf);
        const double drift = mean_drift(tr);
        c_lo = std::min(c_lo, rep.bound_const);
        c_hi = std::max(c_hi, rep.bound_const);
        if (h2.growing) checks.fail(tag + "_h2", "H2 norm still growing after entry");
        checks.expect(tag + "_linf_bound_margin", lb.holds, lb.margin, -1e-8, ">=");
        checks.expect(tag + "_mean_drift", drift < 1e-10, drift, 1e-10, "<");
        if (k > 0 && std::abs(p.sizes[k]) >= std::abs(p.sizes[k - 1]) && prev_entry >= 0.0) {
            checks.expect(tag + "_entry_after_smaller", rep.entry_time >= prev_entry, rep.entry_time, prev_entry, ">=");
        }
        prev_entry = rep.entry_time;
        cases.push_back(json{{"size", p.sizes[k]},
                             {"entry_time", rep.entry_time},
                             {"ceiling", rep.bound_const},
                             {"tail_max", rep.tail_max},
                             {"h2_sup_after_entry", h2.sup_h2_after_entry},
                             {"linf_lhs", lb.lhs},
                             {"linf_rhs", lb.rhs},
                             {"mean_drift", drift}});
        io::CsvTable t({"t", "window_quantity"});
        io::PlotSeries ps{"size " + label_number(p.sizes[k]), {}, {}};
        for (const auto& q : rep.series) {
            t.add_row({q.t, q.q});
            ps.x.push_back(q.t);
            ps.y.push_back(q.q);
        }
        t.write(ctx.out_dir / ("window_size" + std::to_string(k) + ".csv"));
        io::norms_table(tr).write(ctx.out_dir / ("norms_size" + std::to_string(k) + ".csv"));
        plot.push_back(std::move(ps));
    }
    if (c_hi > 0.0 && m > 1) {
        checks.expect("ceiling_spread", c_hi / c_lo <= p.ceiling_spread, c_hi / c_lo, p.ceiling_spread, "<=");
    }
    results["h_linf"] = h_linf;
    results["sizes"] = cases;
    io::write_svg(ctx.out_dir / "window.svg", plot,
                  plot_opts(ctx, "||u||_1^2 + int_t^{t+1} (||u||_2^2 + |u_s|_2^2)", "window quantity", true));

    // One-sided Linf decay at t = 1/2, unforced.
    if (!p.kruzhkov_amplitudes.empty()) {
        if (!(flux.sigma_floor() > 0.0)) {
            results["kruzhkov"] = "skipped: flux has no convexity floor";
        } else {
            SolverConfig kc = cfg.solver;
            kc.snapshot_stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.5 / kc.dt)));
            const std::size_t a = p.kruzhkov_amplitudes.size();
            std::vector<double> vals(a, 0.0);
            std::vector<std::string> errs(a);
            parallel_for(a, ctx.threads, [&](std::size_t k) {
                const Field u0 = sample(grid, [&](double x) {
                    return p.kruzhkov_amplitudes[k] * std::sin(2.0 * std::numbers::pi * x);
                });
                const Trajectory tr = solve(u0, ForcingModel::zero(), flux, kc, 0.0, 0.5);
                if (!tr.completed()) {
                    errs[k] = tr.message;
                    return;
                }
                try {
                    vals[k] = kruzhkov_check(tr, flux).linf_at_half;
                } catch (const std::exception& e) {
                    errs[k] = e.what();
                }
            });
            std::size_t big = 0;
            for (std::size_t k = 1; k < a; ++k) {
                if (std::abs(p.kruzhkov_amplitudes[k]) > std::abs(p.kruzhkov_amplitudes[big])) big = k;
            }
            json fam = json::array();
            for (std::size_t k = 0; k < a; ++k) {
                if (!errs[k].empty()) {
                    checks.fail("kruzhkov_" + std::to_string(k), errs[k]);
                    continue;
                }
                fam.push_back(json{{"amplitude", p.kruzhkov_amplitudes[k]}, {"linf_at_half", vals[k]}});
                checks.expect("kruzhkov_A_" + label_number(p.kruzhkov_amplitudes[k]) + "_uniform",
                              vals[k] <= 2.0 * vals[big], vals[k], 2.0 * vals[big], "<=");
            }
            results["kruzhkov"] = fam;
        }
    }
    return finish("dissipativity", cfg, ctx, checks, results, summary);
}

// ---------------------------------------------------------------------------

inline ExperimentResult run_harnack(const ExperimentConfig& cfg, const RunContext& ctx) {
    const HarnackParams& p = cfg.harnack;
    const SolverConfig& sc = cfg.solver;
    ThetaSweepOptions opt;
    opt.nu = sc.nu;
    opt.T_prime = p.T_prime;
    opt.T = p.T;
    opt.trial_count = p.trials;
    opt.n = sc.n;
    opt.dt = sc.dt;
    opt.seed = cfg.seeds.front();
    opt.threads = ctx.threads;
    opt.scheme = p.scheme;
    log_line(ctx, "harnack_sweep: " + std::to_string(p.rho.size()) + " rho values x " + std::to_string(p.trials) +
                      " trials (" + to_string(p.scheme) + ")");
    const std::vector<ThetaSweepRow> rows = theta_sweep(p.rho, opt);

    Checks checks;
    json results, jrows = json::array(), summary = json::array();
    io::CsvTable table({"rho", "theta_min", "theta_median", "trials"});
    io::CsvTable all({"rho", "trial", "theta"});
    for (const auto& r : rows) {
        table.add_row({r.rho, r.theta_min, r.theta_median, static_cast<double>(r.trials)});
        for (std::size_t i = 0; i < r.thetas.size(); ++i) all.add_row({r.rho, static_cast<double>(i), r.thetas[i]});
        checks.expect("theta_min_rho_" + label_number(r.rho), r.theta_min > 0.0, r.theta_min, 0.0, ">");
        jrows.push_back(json{{"rho", r.rho}, {"theta_min", r.theta_min}, {"theta_median", r.theta_median},
                             {"trials", r.trials}});
        summary.push_back(json{{"case", "harnack rho = " + label_number(r.rho)}, {"theta", r.theta_min}});
    }
    table.write(ctx.out_dir / "theta_sweep.csv");
    all.write(ctx.out_dir / "theta_trials.csv");
    results["theta_sweep"] = jrows;

    if (p.nonexpansion_cases > 0) {
        log_line(ctx, "harnack_sweep: L1 non-expansion corpus of " + std::to_string(p.nonexpansion_cases));
        const PeriodicGrid grid = PeriodicGrid::make(sc.n);
        std::vector<double> viol(p.nonexpansion_cases, 0.0);
        parallel_for(p.nonexpansion_cases, ctx.threads, [&](std::size_t i) {
            std::mt19937_64 rng(derive_seed(cfg.seeds.front(), 0xA1, i));
            const Field w0 = random_bandlimited(grid, 6, 1.0, 1.0, rng);
            std::uniform_real_distribution<double> u(0.0, p.rho_max_nonexpansion);
            const double rho = u(rng);
            const CoefficientPath coeff = random_coefficient_path(grid, rho, 0.0, p.T, 0.01, rng);
            const Trajectory tr = solve_linear(w0, coeff, sc, 0.0, p.T, LinearScheme::Spectral);
            viol[i] = l1_nonexpansion_check(tr).worst_violation;
        });
        std::size_t count = 0;
        for (double v : viol) count += v > 1e-9 ? 1 : 0;
        checks.expect("l1_nonexpansion_violations", count == 0, static_cast<double>(count), 0.0, "==");
        results["l1_nonexpansion"] = json{{"cases", p.nonexpansion_cases},
                                          {"violations", count},
                                          {"worst", *std::max_element(viol.begin(), viol.end())}};
    }
    std::vector<io::PlotSeries> plot{{"theta_min", {}, {}}, {"theta_median", {}, {}}};
    for (const auto& r : rows) {
        plot[0].x.push_back(r.rho);
        plot[0].y.push_back(r.theta_min);
        plot[1].x.push_back(r.rho);
        plot[1].y.push_back(r.theta_median);
    }
    io::PlotOptions po = plot_opts(ctx, "Harnack ratio against rho", "theta", false);
    po.x_label = "rho";
    io::write_svg(ctx.out_dir / "theta_sweep.svg", plot, po);
    return finish("harnack_sweep", cfg, ctx, checks, results, summary);
}

// ---------------------------------------------------------------------------

inline ExperimentResult run_pullback(const ExperimentConfig& cfg, const RunContext& ctx) {
    const PullbackParams& p = cfg.pullback;
    const SolverConfig& sc = cfg.solver;
    const PeriodicGrid grid = PeriodicGrid::make(sc.n);
    const FluxModel flux = cfg.flux.build();
    const ForcingModel fm = cfg.forcing.build(grid, cfg.seeds.front());
    log_line(ctx, "pullback: n_max = " + std::to_string(p.n_max));
    const PullbackResult pb = pullback_bounded_solution(p.c, fm, flux, sc, p.n_max, p.T_view, p.compare_every);

    Checks checks;
    json results, summary = json::array();
    io::CsvTable gaps({"n", "gap"});
    for (std::size_t i = 0; i < pb.cauchy_gaps.size(); ++i) gaps.add_row({pb.gap_index[i], pb.cauchy_gaps[i]});
    gaps.write(ctx.out_dir / "gaps.csv");
    io::norms_table(pb.v_traj).write(ctx.out_dir / "bounded_solution_norms.csv");
    io::write_snapshots(ctx.out_dir / "bounded_solution.bin", pb.v_traj);

    const double ratio = worst_gap_ratio(pb.cauchy_gaps, 1);
    if (ratio == 0.0) {
        checks.fail("gap_ratio", "fewer than two gaps above the roundoff floor for n >= 2");
    } else {
        checks.expect("gap_ratio", ratio < 1.0, ratio, 1.0, "<");
    }
    checks.expect("max_dt_h2", pb.max_dt_h2 < p.dt_h2_tolerance, pb.max_dt_h2, p.dt_h2_tolerance, "<");
    results["cauchy_gaps"] = pb.cauchy_gaps;
    results["worst_gap_ratio"] = ratio;
    results["max_dt_h2"] = pb.max_dt_h2;
    try {
        const std::size_t first = 1;  // n = 2 onward
        std::vector<double> n(pb.gap_index.begin() + first, pb.gap_index.end());
        std::vector<double> g(pb.cauchy_gaps.begin() + first, pb.cauchy_gaps.end());
        const DecayFit f = decay_rate_fit(n, g, n.front(), n.back(), 1e-13);
        results["gap_fit"] = json{{"rate_per_step", f.gamma}, {"ratio", std::exp(-f.gamma)},
                                  {"r_squared", f.r_squared}, {"points", f.points}};
        summary.push_back(json{{"case", "pullback gaps"}, {"gamma", f.gamma}});
    } catch (const std::exception& e) {
        results["gap_fit"] = e.what();
    }

    // Perturbations of the bounded trajectory decay back to it.
    if (!p.probe_sizes.empty()) {
        const Field shape = sample(grid, [](double x) {
            return std::sin(2.0 * std::numbers::pi * x) + 0.5 * std::cos(4.0 * std::numbers::pi * x);
        });
        const double h1 = norm(shape, NormKind::H1);
        std::vector<Field> perturbations;
        for (double s : p.probe_sizes) perturbations.push_back(shape * (s / h1));
        const std::vector<ProbeResult> probes = uniqueness_probe(pb.v_traj, perturbations, sc, flux, fm);
        json jp = json::array();
        double g_lo = std::numeric_limits<double>::infinity(), g_hi = 0.0;
        for (std::size_t k = 0; k < probes.size(); ++k) {
            const ProbeResult& pr = probes[k];
            const std::string label = label_number(p.probe_sizes[k]);
            const std::string tag = "probe_" + label;
            if (!pr.fit) {
                checks.fail(tag, pr.marker);
                continue;
            }
            checks.expect(tag + "_gamma", pr.fit->gamma > 0.0, pr.fit->gamma, 0.0, ">");
            g_lo = std::min(g_lo, pr.fit->gamma);
            g_hi = std::max(g_hi, pr.fit->gamma);
            jp.push_back(json{{"size", p.probe_sizes[k]}, {"h1_size", pr.size}, {"gamma", pr.fit->gamma},
                              {"r_squared", pr.fit->r_squared}});
            summary.push_back(json{{"case", "probe size " + label}, {"gamma", pr.fit->gamma}});
        }
        if (probes.size() > 1 && g_lo > 0.0) {
            checks.expect("probe_gamma_spread", g_hi / g_lo <= 3.0, g_hi / g_lo, 3.0, "<=");
        }
        results["probes"] = jp;
    }
    io::PlotSeries gs{"g_n", pb.gap_index, pb.cauchy_gaps};
    io::PlotOptions po = plot_opts(ctx, "Cauchy gaps of the pullback sequence", "g_n", true);
    po.x_label = "n";
    io::write_svg(ctx.out_dir / "gaps.svg", {gs}, po);
    return finish("pullback", cfg, ctx, checks, results, summary);
}

// ---------------------------------------------------------------------------

inline ExperimentResult run_sync(const ExperimentConfig& cfg, const RunContext& ctx) {
    const SyncParams& p = cfg.sync;
    const SolverConfig& sc = cfg.solver;
    const PeriodicGrid grid = PeriodicGrid::make(sc.n);
    const FluxModel flux = cfg.flux.build();
    const std::size_t m = cfg.seeds.size();
    log_line(ctx, "stochastic_sync: " + std::to_string(m) + " seeds, T_end = " + label_number(p.T_end));
    std::vector<SyncReport> reps(m);
    std::vector<std::string> errs(m);
    parallel_for(m, ctx.threads, [&](std::size_t i) {
        try {
            const Field u0 = cfg.initial.build(grid, cfg.seeds[i]);
            const Field v0 = cfg.initial_v.build(grid, cfg.seeds[i]);
            reps[i] = stochastic_sync_experiment(u0, v0, cfg.forcing.stochastic, cfg.seeds[i], sc, flux, p.T_end);
        } catch (const std::exception& e) {
            errs[i] = e.what();
        }
    });

    Checks checks;
    json results, jr = json::array(), summary = json::array();
    io::CsvTable table({"seed", "K_estimate", "events", "initial_l1", "final_ratio", "nonexpansion_violation"});
    std::vector<io::PlotSeries> plot;
    for (std::size_t i = 0; i < m; ++i) {
        const std::string tag = "seed_" + std::to_string(cfg.seeds[i]);
        if (!errs[i].empty()) {
            checks.fail(tag, errs[i]);
            continue;
        }
        const SyncReport& r = reps[i];
        checks.expect(tag + "_final_ratio", r.final_ratio < p.final_ratio_max, r.final_ratio, p.final_ratio_max, "<");
        checks.expect(tag + "_nonexpansion", r.nonincreasing, r.nonexpansion_violation, 1e-9, "<=");
        table.add_row({static_cast<double>(r.seed), r.K_estimate, static_cast<double>(r.event_times.size()),
                       r.initial_l1, r.final_ratio, r.nonexpansion_violation});
        jr.push_back(json{{"seed", r.seed},
                          {"K_estimate", r.K_estimate},
                          {"event_threshold", r.event_threshold},
                          {"event_times", r.event_times},
                          {"q_k", r.q_k},
                          {"initial_l1", r.initial_l1},
                          {"final_ratio", r.final_ratio},
                          {"nonexpansion_violation", r.nonexpansion_violation}});
        // Late q_k are ratios of roundoff; the whole-run factor is the informative one.
        summary.push_back(json{{"case", "sync seed " + std::to_string(r.seed)}, {"q", r.final_ratio}});
        io::CsvTable s({"t", "l1_difference"});
        io::PlotSeries ps{"seed " + std::to_string(r.seed), {}, {}};
        for (const auto& [t, v] : r.l1_series) {
            s.add_row({t, v});
            ps.x.push_back(t);
            ps.y.push_back(v);
        }
        s.write(ctx.out_dir / ("l1_seed" + std::to_string(r.seed) + ".csv"));
        plot.push_back(std::move(ps));
    }
    table.write(ctx.out_dir / "sync.csv");
    results["runs"] = jr;
    if (m > 0 && errs[0].empty()) {
        StochasticSpec s = cfg.forcing.stochastic;
        s.horizon = std::max(s.horizon, p.T_end);
        const StochasticPath path(s, cfg.seeds[0]);
        io::forcing_path_table(path).write(ctx.out_dir / ("forcing_path_seed" + std::to_string(cfg.seeds[0]) + ".csv"));
    }
    io::write_svg(ctx.out_dir / "sync.svg", plot, plot_opts(ctx, "|u - v|_1 under common random forcing", "|u - v|_1", true));
    return finish("stochastic_sync", cfg, ctx, checks, results, summary);
}

inline std::string summary_table_text(const nlohmann::json& rows) {
    std::ostringstream o;
    auto cell = [](const nlohmann::json& row, const char* key) -> std::string {
        if (!row.contains(key)) return "-";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", row[key].get<double>());
        return buf;
    };
    o << std::left << std::setw(34) << "case" << std::setw(12) << "q" << std::setw(12) << "gamma" << "theta\n";
    for (const auto& r : rows) {
        o << std::left << std::setw(34) << r["case"].get<std::string>() << std::setw(12) << cell(r, "q")
          << std::setw(12) << cell(r, "gamma") << cell(r, "theta") << "\n";
    }
    return o.str();
}

}  // namespace exp_detail

inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunContext& ctx);

namespace exp_detail {

inline ExperimentResult run_full_suite(const ExperimentConfig& cfg, const RunContext& ctx) {
    Checks checks;
    json results = json::object(), summary = json::array();
    for (ExperimentKind k : all_experiment_kinds()) {
        if (k == ExperimentKind::FullSuite) continue;
        ExperimentConfig sub = default_config(k);
        RunContext sctx = ctx;
        sctx.out_dir = ctx.out_dir / to_string(k);
        const ExperimentResult r = run_experiment(sub, sctx);
        results[to_string(k)] = json{{"passed", r.passed()}, {"failures", r.failures}};
        for (const auto& f : r.failures) checks.fail(std::string(to_string(k)) + ": " + f, "failed");
        for (const auto& row : r.summary_rows) summary.push_back(row);
    }
    results["summary"] = summary;
    const std::string table = summary_table_text(summary);
    io::write_text(ctx.out_dir / "summary.txt", table);
    if (ctx.log) *ctx.log << table;
    return finish("full_suite", cfg, ctx, checks, results, summary);
}

}  // namespace exp_detail

inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunContext& ctx) {
    std::filesystem::create_directories(ctx.out_dir);
    switch (cfg.experiment) {
        case ExperimentKind::Oracle: return exp_detail::run_oracle(cfg, ctx);
        case ExperimentKind::Contraction: return exp_detail::run_contraction(cfg, ctx);
        case ExperimentKind::Dissipativity: return exp_detail::run_dissipativity(cfg, ctx);
        case ExperimentKind::HarnackSweep: return exp_detail::run_harnack(cfg, ctx);
        case ExperimentKind::Pullback: return exp_detail::run_pullback(cfg, ctx);
        case ExperimentKind::StochasticSync: return exp_detail::run_sync(cfg, ctx);
        case ExperimentKind::FullSuite: return exp_detail::run_full_suite(cfg, ctx);
    }
    throw std::logic_error("unknown experiment");
}

}  // namespace burgers_lab
