#pragma once

// Monitors for the a priori estimates on a computed trajectory.

#include "burgers_lab/flux.hpp"
#include "burgers_lab/forcing.hpp"
#include "burgers_lab/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace burgers_lab {

struct LinfBoundResult {
    bool holds = false;
    double margin = 0.0;  // rhs - lhs
    double lhs = 0.0;
    double rhs = 0.0;
};

/// max_t |u(t)|_inf <= |u0|_inf + (T - t0) h_linf + tol. The right side uses
/// the sup of the trigonometric interpolant of u0, which is the function the
/// spectral solution actually starts from.
inline LinfBoundResult check_linf_bound(const Trajectory& traj, double h_linf, double tol = 1e-8) {
    if (traj.records.empty() || traj.snapshots.empty()) throw std::invalid_argument("empty trajectory");
    LinfBoundResult out;
    for (const NormRecord& r : traj.records) out.lhs = std::max(out.lhs, r.linf);
    const double u0_sup = std::max(interpolant_sup_norm(traj.initial_state()), traj.records.front().linf);
    out.rhs = u0_sup + (traj.t_end - traj.t0) * h_linf;
    out.margin = out.rhs - out.lhs;
    out.holds = out.lhs <= out.rhs + tol;
    return out;
}

struct ResidualPoint {
    double t = 0.0;
    double r = 0.0;
};

/// r = d/dt |u|_2^2 + 2 nu |u_x|_2^2 - 2 (h, u) at interior records, with the
/// time derivative from the three-point centred formula on a possibly
/// uneven record spacing.
inline std::vector<ResidualPoint> energy_identity_residual(const Trajectory& traj) {
    const auto& rec = traj.records;
    if (rec.size() < 3) throw std::invalid_argument("energy residual needs at least three records");
    const double nu = traj.config.nu;
    std::vector<ResidualPoint> out;
    out.reserve(rec.size() - 2);
    for (std::size_t i = 1; i + 1 < rec.size(); ++i) {
        const double h0 = rec[i].t - rec[i - 1].t;
        const double h1 = rec[i + 1].t - rec[i].t;
        const double d = (-h1 / (h0 * (h0 + h1))) * rec[i - 1].l2sq +
                         ((h1 - h0) / (h0 * h1)) * rec[i].l2sq +
                         (h0 / (h1 * (h0 + h1))) * rec[i + 1].l2sq;
        out.push_back({rec[i].t, d + 2.0 * nu * rec[i].dx_l2sq - 2.0 * rec[i].h_dot_u});
    }
    return out;
}

inline double max_abs_residual(const std::vector<ResidualPoint>& r) {
    double m = 0.0;
    for (const auto& p : r) m = std::max(m, std::abs(p.r));
    return m;
}

struct DissipativityPoint {
    double t = 0.0;
    double q = 0.0;  // ||u(t)||_1^2 + int_t^{t+1} (||u||_2^2 + |u_s|_2^2) ds
};

struct DissipativityReport {
    double entry_time = 0.0;
    double bound_const = 0.0;  // the ceiling
    double tail_max = 0.0;
    std::vector<DissipativityPoint> series;
};

/// Sliding-window form of the uniform bound. The ceiling is 1.5 times the
/// largest value over the last unit of the window range plus h_linf^2, so it
/// scales with the forcing and tends to zero for unforced decay.
inline DissipativityReport dissipativity_report(const Trajectory& traj, const SolverConfig&, double h_linf) {
    const auto& rec = traj.records;
    if (rec.size() < 2 || rec.back().t - rec.front().t < 3.0) {
        throw std::invalid_argument("run too short for the dissipativity window (need at least 3 time units)");
    }
    const std::size_t N = rec.size();
    // Cumulative trapezoid of ||u||_{H2}^2 + |u_t|_2^2.
    std::vector<double> cum(N, 0.0);
    for (std::size_t i = 1; i < N; ++i) {
        const double g0 = rec[i - 1].h2 * rec[i - 1].h2 + rec[i - 1].dt_l2 * rec[i - 1].dt_l2;
        const double g1 = rec[i].h2 * rec[i].h2 + rec[i].dt_l2 * rec[i].dt_l2;
        cum[i] = cum[i - 1] + 0.5 * (rec[i].t - rec[i - 1].t) * (g0 + g1);
    }
    auto integral_to = [&](double t) {
        const auto it = std::lower_bound(rec.begin(), rec.end(), t,
                                         [](const NormRecord& r, double x) { return r.t < x; });
        std::size_t i = static_cast<std::size_t>(it - rec.begin());
        if (i >= N) return cum.back();
        if (i == 0) return 0.0;
        const double g0 = rec[i - 1].h2 * rec[i - 1].h2 + rec[i - 1].dt_l2 * rec[i - 1].dt_l2;
        const double g1 = rec[i].h2 * rec[i].h2 + rec[i].dt_l2 * rec[i].dt_l2;
        const double s = (t - rec[i - 1].t) / (rec[i].t - rec[i - 1].t);
        const double gt = g0 + s * (g1 - g0);
        return cum[i - 1] + 0.5 * (t - rec[i - 1].t) * (g0 + gt);
    };

    DissipativityReport out;
    const double t_last = rec.back().t - 1.0;
    for (std::size_t i = 0; i < N && rec[i].t <= t_last + 1e-12; ++i) {
        const double q = rec[i].h1 * rec[i].h1 + integral_to(rec[i].t + 1.0) - cum[i];
        out.series.push_back({rec[i].t, q});
    }
    for (const auto& p : out.series) {
        if (p.t >= t_last - 1.0) out.tail_max = std::max(out.tail_max, p.q);
    }
    out.bound_const = 1.5 * out.tail_max + h_linf * h_linf;
    out.entry_time = out.series.front().t;
    for (std::size_t i = out.series.size(); i-- > 0;) {
        if (out.series[i].q > out.bound_const) {
            out.entry_time = i + 1 < out.series.size() ? out.series[i + 1].t : out.series[i].t;
            break;
        }
    }
    return out;
}

struct KruzhkovResult {
    double linf_at_half = 0.0;            // |u(t0 + 1/2)|_inf
    double zero_mean_linf_at_half = 0.0;  // |u(t0 + 1/2) - <u>|_inf
};

/// Reads |u(t0 + 1/2)|_inf from a stored snapshot. The flux must carry a
/// positive convexity floor that holds on the range the solution visits.
inline KruzhkovResult kruzhkov_check(const Trajectory& traj, const FluxModel& flux) {
    if (!(flux.sigma_floor() > 0.0)) throw std::invalid_argument("convexity required");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const NormRecord& r : traj.records) {
        lo = std::min(lo, r.min);
        hi = std::max(hi, r.max);
    }
    if (hi - lo < 1e-12) {
        lo -= 1.0;
        hi += 1.0;
    }
    if (!flux.check_convexity(lo, hi).holds) throw std::invalid_argument("convexity required");
    const Field& u = traj.snapshot_at(traj.t0 + 0.5);
    KruzhkovResult out;
    out.linf_at_half = norm(u, NormKind::Linf);
    const double c = mean_value(u);
    for (double v : u.values()) out.zero_mean_linf_at_half = std::max(out.zero_mean_linf_at_half, std::abs(v - c));
    return out;
}

struct H2BoundResult {
    double sup_h2_after_entry = 0.0;
    double sup_first_half = 0.0;
    double sup_second_half = 0.0;
    bool growing = false;  // second half of the post-entry window exceeds the first by > 5%
};

inline H2BoundResult h2_bound_check(const Trajectory& traj, double entry_time = 0.0) {
    H2BoundResult out;
    const double mid = 0.5 * (std::max(entry_time, traj.t0) + traj.t_end);
    bool any = false;
    for (const NormRecord& r : traj.records) {
        if (r.t < entry_time) continue;
        any = true;
        out.sup_h2_after_entry = std::max(out.sup_h2_after_entry, r.h2);
        if (r.t <= mid) out.sup_first_half = std::max(out.sup_first_half, r.h2);
        else out.sup_second_half = std::max(out.sup_second_half, r.h2);
    }
    if (!any) throw std::invalid_argument("no records after the entry time");
    out.growing = out.sup_second_half > 1.05 * out.sup_first_half;
    return out;
}

}  // namespace burgers_lab
