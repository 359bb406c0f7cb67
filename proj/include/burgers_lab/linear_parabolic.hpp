#pragma once

// w_t - nu w_xx + (a(t, x) w)_x = 0 on the circle.

#include "burgers_lab/integrator.hpp"
#include "burgers_lab/parallel.hpp"
#include "burgers_lab/random_fields.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace burgers_lab {

/// Coefficient a(t, .) stored at increasing times. Between stored times it
/// is interpolated in t by a Lagrange polynomial of the given odd order
/// (1 = piecewise linear) on the nearest order + 1 stored times.
class CoefficientPath {
public:
    CoefficientPath(std::vector<double> times, std::vector<Field> fields, int order = 1)
        : times_(std::move(times)), fields_(std::move(fields)), order_(order) {
        if (times_.empty() || times_.size() != fields_.size()) {
            throw std::invalid_argument("coefficient path needs one field per time");
        }
        if (order_ < 1 || order_ > 15 || order_ % 2 == 0) {
            throw std::invalid_argument("interpolation order must be odd and in [1, 15]");
        }
        for (std::size_t i = 1; i < times_.size(); ++i) {
            if (!(times_[i] > times_[i - 1])) throw std::invalid_argument("coefficient times must increase");
            fields_[i].check_same_grid(fields_[0]);
        }
        for (const Field& a : fields_) {
            const Field ax = derivative(a, 1);
            rho_bound_ = std::max(rho_bound_, norm(a, NormKind::Linf) + norm(ax, NormKind::Linf));
        }
    }

    /// Time-independent coefficient on [t0, t1].
    static CoefficientPath constant(const Field& a, double t0, double t1) {
        if (!(t1 > t0)) throw std::invalid_argument("coefficient window must have t1 > t0");
        return CoefficientPath({t0, t1}, {a, a});
    }

    const PeriodicGrid& grid() const { return fields_.front().grid(); }
    double t_begin() const { return times_.front(); }
    double t_end() const { return times_.back(); }
    double rho_bound() const { return rho_bound_; }
    int order() const { return order_; }
    const std::vector<double>& times() const { return times_; }
    const std::vector<Field>& fields() const { return fields_; }

    bool covers(double t0, double t1) const {
        const double eps = 1e-9 * std::max(1.0, std::abs(t_end()) + std::abs(t_begin()));
        return t0 >= t_begin() - eps && t1 <= t_end() + eps;
    }

    void eval_into(double t, std::vector<double>& out) const {
        const std::size_t n = grid().n();
        out.resize(n);
        if (!covers(t, t)) {
            throw std::out_of_range("coefficient gap in window at t = " + std::to_string(t));
        }
        if (times_.size() == 1 || t <= times_.front()) {
            std::copy(fields_.front().values().begin(), fields_.front().values().end(), out.begin());
            return;
        }
        if (t >= times_.back()) {
            std::copy(fields_.back().values().begin(), fields_.back().values().end(), out.begin());
            return;
        }
        const auto it = std::upper_bound(times_.begin(), times_.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - times_.begin()) - 1;
        // Stencil of order + 1 points around [t_i, t_{i+1}], shifted inward at the ends.
        const std::size_t width = std::min<std::size_t>(static_cast<std::size_t>(order_) + 1, times_.size());
        const std::size_t half = width / 2 - 1;
        std::size_t first = i >= half ? i - half : 0;
        first = std::min(first, times_.size() - width);
        std::array<double, 16> weights;
        std::fill(weights.begin(), weights.end(), 1.0);
        for (std::size_t a = 0; a < width; ++a) {
            for (std::size_t b = 0; b < width; ++b) {
                if (a != b) weights[a] *= (t - times_[first + b]) / (times_[first + a] - times_[first + b]);
            }
        }
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t a = 0; a < width; ++a) {
            const Field& f = fields_[first + a];
            const double w = weights[a];
            for (std::size_t j = 0; j < n; ++j) out[j] += w * f[j];
        }
    }

    Field at(double t) const {
        std::vector<double> v;
        eval_into(t, v);
        return Field(grid(), std::move(v));
    }

private:
    std::vector<double> times_;
    std::vector<Field> fields_;
    int order_ = 1;
    double rho_bound_ = 0.0;
};

enum class LinearScheme {
    Spectral,     // same integrator as the nonlinear solver, dealiased a*w
    FiniteVolume  // MUSCL/minmod upwind + central diffusion, SSP-RK2; keeps w >= 0
};

inline const char* to_string(LinearScheme s) {
    return s == LinearScheme::Spectral ? "spectral" : "finite_volume";
}

namespace detail {

class LinearOperator {
public:
    LinearOperator(const CoefficientPath& coeff, std::size_t n, bool dealias)
        : coeff_(coeff), n_(n), dealias_(dealias), fft_(n), prod_(n), pspec_(n / 2 + 1),
          zero_(n / 2 + 1) {}

    void rhs(const Spectrum&, const std::vector<double>& phys, double t, Spectrum& out) {
        coeff_.eval_into(t, a_);
        for (std::size_t j = 0; j < n_; ++j) prod_[j] = a_[j] * phys[j];
        fft_.forward(prod_, pspec_);
        if (dealias_) apply_dealias(pspec_, n_);
        differentiate_spectrum(pspec_, n_, 1);
        out.resize(pspec_.size());
        for (std::size_t m = 0; m < out.size(); ++m) out[m] = -pspec_[m];
    }

    double max_speed(const std::vector<double>&, double t) {
        coeff_.eval_into(t, a_);
        double s = 0.0;
        for (double v : a_) s = std::max(s, std::abs(v));
        return s;
    }

    const Spectrum& forcing(double) const { return zero_; }

private:
    const CoefficientPath& coeff_;
    std::size_t n_;
    bool dealias_;
    FourierTransform fft_;
    std::vector<double> a_, prod_;
    Spectrum pspec_, zero_;
};

inline double minmod(double a, double b) {
    if (a * b <= 0.0) return 0.0;
    return a > 0.0 ? std::min(a, b) : std::max(a, b);
}

/// Cell averages at the nodes, faces at x_{j+1/2}. Face speed is the mean of
/// the two neighbouring nodal values of a.
class FiniteVolumeIntegrator {
public:
    FiniteVolumeIntegrator(const SolverConfig& cfg, const CoefficientPath& coeff)
        : cfg_(cfg), coeff_(coeff), n_(static_cast<std::size_t>(cfg.n)), fft_(n_),
          grid_(PeriodicGrid::make(cfg.n)) {}

    Trajectory run(const Field& w0, double t0, double T) {
        cfg_.validate();
        if (w0.grid().n() != n_) throw std::invalid_argument("initial field does not match config resolution");
        if (!(T > t0)) throw std::invalid_argument("end time must exceed start time");
        const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil((T - t0) / cfg_.dt - 1e-9)));
        const double h = (T - t0) / static_cast<double>(steps);
        const double dx = grid_.dx();

        Trajectory traj;
        traj.grid = grid_;
        traj.config = cfg_;
        traj.t0 = t0;
        traj.t_end = T;

        std::vector<double> w(w0.values().begin(), w0.values().end());
        std::vector<double> k(n_), stage(n_);
        for (std::size_t step = 0;; ++step) {
            const double t = t0 + static_cast<double>(step) * h;
            const bool last = step == steps;
            if (last || step % cfg_.record_stride == 0) {
                rhs(w, t, k);
                traj.records.push_back(record(t, w, k));
            }
            if (last || step % cfg_.snapshot_stride == 0) {
                traj.snapshot_times.push_back(t);
                traj.snapshots.emplace_back(grid_, w);
            }
            if (last) break;

            // 3 lambda max|a| + 2 mu <= 0.9 keeps each Euler stage a convex
            // combination of neighbouring values.
            coeff_.eval_into(t, a_);
            double amax = 0.0;
            for (double v : a_) amax = std::max(amax, std::abs(v));
            const double rate = 3.0 * amax / dx + 2.0 * cfg_.nu / (dx * dx);
            const auto sub = static_cast<std::size_t>(std::max(1.0, std::ceil(h * rate / 0.9)));
            const double hs = h / static_cast<double>(sub);
            for (std::size_t s = 0; s < sub; ++s) {
                const double ts = t + static_cast<double>(s) * hs;
                rhs(w, ts, k);
                for (std::size_t j = 0; j < n_; ++j) stage[j] = w[j] + hs * k[j];
                rhs(stage, ts + hs, k);
                for (std::size_t j = 0; j < n_; ++j) w[j] = 0.5 * w[j] + 0.5 * (stage[j] + hs * k[j]);
            }
            traj.substeps += sub;
            for (double v : w) {
                if (!std::isfinite(v)) {
                    traj.status = RunStatus::NonFinite;
                    traj.message = "non-finite values at t = " + std::to_string(t + h);
                    traj.t_end = traj.records.back().t;
                    return traj;
                }
            }
        }
        return traj;
    }

private:
    void rhs(const std::vector<double>& w, double t, std::vector<double>& out) {
        coeff_.eval_into(t, a_);
        const double dx = grid_.dx();
        const double inv_dx = 1.0 / dx;
        const double diff = cfg_.nu / (dx * dx);
        slope_.resize(n_);
        flux_.resize(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            const double wl = w[(j + n_ - 1) % n_], wr = w[(j + 1) % n_];
            slope_[j] = minmod(w[j] - wl, wr - w[j]);
        }
        for (std::size_t j = 0; j < n_; ++j) {
            const std::size_t jp = (j + 1) % n_;
            const double af = 0.5 * (a_[j] + a_[jp]);
            const double left = w[j] + 0.5 * slope_[j];
            const double right = w[jp] - 0.5 * slope_[jp];
            flux_[j] = std::max(af, 0.0) * left + std::min(af, 0.0) * right;
        }
        for (std::size_t j = 0; j < n_; ++j) {
            const std::size_t jm = (j + n_ - 1) % n_, jp = (j + 1) % n_;
            out[j] = -(flux_[j] - flux_[jm]) * inv_dx + diff * (w[jp] - 2.0 * w[j] + w[jm]);
        }
    }

    NormRecord record(double t, const std::vector<double>& w, const std::vector<double>& k) {
        const Spectrum c = fft_.forward(w);
        const Spectrum dk = fft_.forward(k);
        const Spectrum zero(c.size());
        return norm_record(t, c, w, zero, dk);
    }

    SolverConfig cfg_;
    const CoefficientPath& coeff_;
    std::size_t n_;
    FourierTransform fft_;
    PeriodicGrid grid_;
    std::vector<double> a_, slope_, flux_;
};

}  // namespace detail

/// Integrates the divergence-form linear equation from t0 to T.
inline Trajectory solve_linear(const Field& w0, const CoefficientPath& coeff, const SolverConfig& cfg,
                               double t0, double T, LinearScheme scheme = LinearScheme::Spectral) {
    cfg.validate();
    if (!(coeff.grid() == w0.grid())) throw std::invalid_argument("coefficient and data grids differ");
    if (!coeff.covers(t0, T)) throw std::out_of_range("coefficient gap in window");
    if (scheme == LinearScheme::FiniteVolume) {
        detail::FiniteVolumeIntegrator integrator(cfg, coeff);
        return integrator.run(w0, t0, T);
    }
    detail::LinearOperator op(coeff, static_cast<std::size_t>(cfg.n), cfg.dealias);
    detail::SpectralIntegrator<detail::LinearOperator> integrator(cfg, op);
    return integrator.run(w0, t0, T);
}

struct NonExpansionResult {
    bool holds = true;
    double worst_violation = 0.0;  // max over s <= t of |w(t)|_1 - |w(s)|_1, clipped at 0
};

/// Scans the L1 record series against its running minimum.
inline NonExpansionResult l1_nonexpansion_check(const Trajectory& traj, double tol = 1e-9) {
    NonExpansionResult out;
    double running_min = std::numeric_limits<double>::infinity();
    for (const NormRecord& r : traj.records) {
        if (r.l1 > running_min) out.worst_violation = std::max(out.worst_violation, r.l1 - running_min);
        running_min = std::min(running_min, r.l1);
    }
    out.holds = out.worst_violation <= tol;
    return out;
}

struct HarnackReport {
    double T_prime = 0.0;
    double T = 0.0;
    double max_at_Tprime = 0.0;
    double min_at_T = 0.0;
    double theta_observed = 0.0;
    double min_over_run = 0.0;  // lowest nodal value seen, for the positivity monitor
};

/// theta = min_x w(T) / max_x w(T'), solving from t = 0 with the snapshot at
/// T' landing exactly on a step.
inline HarnackReport harnack_ratio(const Field& w0, const CoefficientPath& coeff, const SolverConfig& cfg,
                                   double T_prime, double T,
                                   LinearScheme scheme = LinearScheme::FiniteVolume) {
    if (!(T_prime > 0.0 && T > T_prime)) throw std::invalid_argument("need 0 < T_prime < T");
    if (min_value(w0) < 0.0) throw std::invalid_argument("negative initial data");
    if (max_value(w0) <= 0.0) throw std::invalid_argument("initial data is identically zero");
    SolverConfig c = cfg;
    c.record_stride = 1;
    c.snapshot_stride = std::numeric_limits<std::size_t>::max();
    const Trajectory first = solve_linear(w0, coeff, c, 0.0, T_prime, scheme);
    const Trajectory second = solve_linear(first.final_state(), coeff, c, T_prime, T, scheme);
    if (!first.completed() || !second.completed()) throw std::runtime_error("linear solve did not complete");

    HarnackReport rep;
    rep.T_prime = T_prime;
    rep.T = T;
    rep.max_at_Tprime = max_value(first.final_state());
    rep.min_at_T = min_value(second.final_state());
    rep.theta_observed = rep.min_at_T / rep.max_at_Tprime;
    rep.min_over_run = std::numeric_limits<double>::infinity();
    for (const auto* tr : {&first, &second}) {
        for (const NormRecord& r : tr->records) rep.min_over_run = std::min(rep.min_over_run, r.min);
    }
    return rep;
}

/// Random coefficient with |a|_inf + |a_x|_inf = rho at its worst stored time:
/// a few travelling cosines, sampled every dt_store on [t0, t1].
inline CoefficientPath random_coefficient_path(const PeriodicGrid& grid, double rho, double t0, double t1,
                                               double dt_store, std::mt19937_64& rng) {
    const auto count = static_cast<std::size_t>(std::ceil((t1 - t0) / dt_store - 1e-9));
    std::vector<double> times(count + 1);
    for (std::size_t i = 0; i <= count; ++i) times[i] = t0 + (t1 - t0) * static_cast<double>(i) / count;
    if (rho <= 0.0) {
        std::vector<Field> zeros(times.size(), Field(grid));
        return CoefficientPath(std::move(times), std::move(zeros));
    }
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    const double a0 = u(rng);
    double r[3], ph[3], om[3];
    for (int k = 0; k < 3; ++k) {
        r[k] = u(rng) / (k + 1);
        ph[k] = phase(rng);
        om[k] = 4.0 * u(rng);
    }
    std::vector<Field> fields;
    fields.reserve(times.size());
    double worst = 0.0;
    for (double t : times) {
        std::vector<double> v(grid.n());
        for (std::size_t j = 0; j < grid.n(); ++j) {
            const double x = grid.node(j);
            double s = a0;
            for (int k = 0; k < 3; ++k) s += r[k] * std::cos(2.0 * std::numbers::pi * (k + 1) * x + ph[k] + om[k] * t);
            v[j] = s;
        }
        Field a(grid, std::move(v));
        worst = std::max(worst, norm(a, NormKind::Linf) + norm(derivative(a, 1), NormKind::Linf));
        fields.push_back(std::move(a));
    }
    for (Field& a : fields) a *= rho / worst;
    return CoefficientPath(std::move(times), std::move(fields));
}

struct ThetaSweepRow {
    double rho = 0.0;
    double theta_min = 0.0;
    double theta_median = 0.0;
    std::size_t trials = 0;
    std::vector<double> thetas;
};

struct ThetaSweepOptions {
    double nu = 0.1;
    double T_prime = 0.5;
    double T = 1.0;
    std::size_t trial_count = 50;
    long n = 128;
    double dt = 1e-3;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    LinearScheme scheme = LinearScheme::FiniteVolume;
};

inline ThetaSweepRow summarize_thetas(double rho, std::vector<double> thetas) {
    ThetaSweepRow row;
    row.rho = rho;
    row.trials = thetas.size();
    row.thetas = thetas;
    if (thetas.empty()) return row;
    std::sort(thetas.begin(), thetas.end());
    row.theta_min = thetas.front();
    const std::size_t mid = thetas.size() / 2;
    row.theta_median = thetas.size() % 2 ? thetas[mid] : 0.5 * (thetas[mid - 1] + thetas[mid]);
    return row;
}

/// Empirical lower envelope of theta over randomized nonnegative data and
/// coefficients with bound rho. Trial i of rho index r uses a seed derived
/// from (seed, r, i), so the table does not depend on the thread count.
inline std::vector<ThetaSweepRow> theta_sweep(const std::vector<double>& rho_values,
                                              const ThetaSweepOptions& opt) {
    if (opt.trial_count == 0) throw std::invalid_argument("trial_count must be positive");
    const PeriodicGrid grid = PeriodicGrid::make(opt.n);
    SolverConfig cfg;
    cfg.nu = opt.nu;
    cfg.n = opt.n;
    cfg.dt = opt.dt;
    std::vector<std::vector<double>> thetas(rho_values.size(), std::vector<double>(opt.trial_count));
    const std::size_t total = rho_values.size() * opt.trial_count;
    parallel_for(total, opt.threads, [&](std::size_t idx) {
        const std::size_t r = idx / opt.trial_count, i = idx % opt.trial_count;
        std::mt19937_64 rng(derive_seed(opt.seed, r, i));
        const Field w0 = random_nonnegative(grid, 4, rng);
        const CoefficientPath coeff = random_coefficient_path(grid, rho_values[r], 0.0, opt.T, 0.01, rng);
        thetas[r][i] = harnack_ratio(w0, coeff, cfg, opt.T_prime, opt.T, opt.scheme).theta_observed;
    });
    std::vector<ThetaSweepRow> rows;
    for (std::size_t r = 0; r < rho_values.size(); ++r) rows.push_back(summarize_thetas(rho_values[r], thetas[r]));
    return rows;
}

}  // namespace burgers_lab
