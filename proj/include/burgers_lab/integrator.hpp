#pragma once

#include "burgers_lab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace burgers_lab {

enum class Scheme {
    IMEX_IF_RK3,  // exact diffusion via integrating factor, explicit third-order Heun RK
    CN_AB2        // Crank-Nicolson diffusion, Adams-Bashforth 2 explicit part
};

inline const char* to_string(Scheme s) {
    return s == Scheme::IMEX_IF_RK3 ? "IMEX_IF_RK3" : "CN_AB2";
}

struct SolverConfig {
    double nu = 0.1;
    long n = 128;
    double dt = 1e-3;
    Scheme scheme = Scheme::IMEX_IF_RK3;
    bool dealias = true;
    double cfl_safety = 0.5;
    double blowup_linf = 1e6;
    std::size_t record_stride = 1;    // base steps between norm records
    std::size_t snapshot_stride = 1;  // base steps between stored fields

    void validate() const {
        if (!(nu > 0.0)) throw std::invalid_argument("nu must be positive");
        if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
        if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) {
            throw std::invalid_argument("cfl_safety must lie in (0, 1]");
        }
        if (!(blowup_linf > 0.0)) throw std::invalid_argument("blowup_linf must be positive");
        if (record_stride == 0 || snapshot_stride == 0) {
            throw std::invalid_argument("record and snapshot strides must be positive");
        }
        PeriodicGrid::make(n);
    }
};

/// Per-time diagnostics. Squared quantities are kept alongside norms so the
/// energy identity can be checked without recomputation.
struct NormRecord {
    double t = 0.0;
    double l1 = 0.0, l2 = 0.0, linf = 0.0, h1 = 0.0, h2 = 0.0;
    double mean = 0.0, min = 0.0, max = 0.0;
    double l2sq = 0.0;     // |u|_2^2
    double dx_l2sq = 0.0;  // |u_x|_2^2
    double h_dot_u = 0.0;  // (h, u)
    double dt_l2 = 0.0;    // |u_t|_2 from the right-hand side
    double dt_h2 = 0.0;    // ||u_t||_{H^2}
};

enum class RunStatus { Completed, Blowup, NonFinite };

inline const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Completed: return "completed";
        case RunStatus::Blowup: return "blowup";
        case RunStatus::NonFinite: return "non_finite";
    }
    return "?";
}

struct Trajectory {
    PeriodicGrid grid = PeriodicGrid::make(8);
    SolverConfig config;
    double t0 = 0.0;
    double t_end = 0.0;
    std::vector<NormRecord> records;
    std::vector<double> snapshot_times;
    std::vector<Field> snapshots;
    RunStatus status = RunStatus::Completed;
    std::string message;
    std::size_t substeps = 0;  // total sub-steps taken

    bool completed() const { return status == RunStatus::Completed; }
    const Field& initial_state() const { return snapshots.front(); }
    const Field& final_state() const { return snapshots.back(); }

    /// Index of the snapshot closest to t; throws if none is within tol.
    std::size_t snapshot_index(double t, double tol) const {
        std::size_t best = 0;
        double err = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
            const double e = std::abs(snapshot_times[i] - t);
            if (e < err) {
                err = e;
                best = i;
            }
        }
        if (!(err <= tol)) {
            throw std::out_of_range("no snapshot stored near t = " + std::to_string(t));
        }
        return best;
    }
    const Field& snapshot_at(double t) const {
        return snapshots[snapshot_index(t, 1e-6 * std::max(1.0, config.dt))];
    }

    /// Copy limited to records and snapshots with t in [a, b].
    Trajectory restricted(double a, double b) const {
        Trajectory out = *this;
        out.records.clear();
        out.snapshot_times.clear();
        out.snapshots.clear();
        const double eps = 1e-9 * std::max(1.0, config.dt);
        for (const auto& r : records) {
            if (r.t >= a - eps && r.t <= b + eps) out.records.push_back(r);
        }
        for (std::size_t i = 0; i < snapshots.size(); ++i) {
            if (snapshot_times[i] >= a - eps && snapshot_times[i] <= b + eps) {
                out.snapshot_times.push_back(snapshot_times[i]);
                out.snapshots.push_back(snapshots[i]);
            }
        }
        out.t0 = std::max(a, t0);
        out.t_end = std::min(b, t_end);
        return out;
    }
};

namespace detail {

/// Norm record from the spectrum and grid values of u, the forcing spectrum,
/// and the spectrum of u_t.
inline NormRecord norm_record(double t, std::span<const Complex> c, std::span<const double> phys,
                              std::span<const Complex> forcing, std::span<const Complex> dt_spec) {
    const std::size_t n = phys.size();
    NormRecord r;
    r.t = t;
    double sum = 0.0, abs_sum = 0.0, sq_sum = 0.0, linf = 0.0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : phys) {
        sum += v;
        abs_sum += std::abs(v);
        sq_sum += v * v;
        linf = std::max(linf, std::abs(v));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    r.mean = sum * inv_n;
    r.l1 = abs_sum * inv_n;
    r.l2 = std::sqrt(sq_sum * inv_n);
    r.linf = linf;
    r.min = lo;
    r.max = hi;
    const SobolevParts parts = sobolev_parts(c, n);
    r.l2sq = parts.l2sq;
    r.dx_l2sq = parts.d1sq;
    r.h1 = parts.h1();
    r.h2 = parts.h2();
    r.h_dot_u = spectral_inner(forcing, c, n);
    const SobolevParts dparts = sobolev_parts(dt_spec, n);
    r.dt_l2 = std::sqrt(dparts.l2sq);
    r.dt_h2 = dparts.h2();
    return r;
}

/// Drives u_t = nu u_xx + N(u, t) in Fourier space. The operator supplies
///   void rhs(const Spectrum& c, const std::vector<double>& phys, double t, Spectrum& out)
///   double max_speed(const std::vector<double>& phys, double t)
///   Spectrum forcing(double t)   (for the (h, u) diagnostic; zero if absent)
/// where phys is the grid form of c.
template <class Op>
class SpectralIntegrator {
public:
    SpectralIntegrator(const SolverConfig& cfg, Op& op)
        : cfg_(cfg), op_(op), n_(static_cast<std::size_t>(cfg.n)), fft_(n_),
          grid_(PeriodicGrid::make(cfg.n)) {
        k2_.resize(n_ / 2 + 1);
        for (std::size_t m = 0; m < k2_.size(); ++m) {
            const double k = wavenumber(m);
            k2_[m] = k * k;
        }
    }

    Trajectory run(const Field& u0, double t0, double T) {
        cfg_.validate();
        if (u0.grid().n() != n_) throw std::invalid_argument("initial field does not match config resolution");
        if (!(T > t0)) throw std::invalid_argument("end time must exceed start time");

        const auto steps = static_cast<std::size_t>(
            std::max(1.0, std::ceil((T - t0) / cfg_.dt - 1e-9)));
        const double h = (T - t0) / static_cast<double>(steps);
        const double dx = grid_.dx();

        Trajectory traj;
        traj.grid = grid_;
        traj.config = cfg_;
        traj.t0 = t0;
        traj.t_end = T;

        Spectrum c = fft_.forward(u0.values());
        std::vector<double> phys(u0.values().begin(), u0.values().end());
        Spectrum k1(c.size());
        have_history_ = false;

        for (std::size_t step = 0;; ++step) {
            const double t = t0 + static_cast<double>(step) * h;
            const bool last = step == steps;
            op_.rhs(c, phys, t, k1);
            if (last || step % cfg_.record_stride == 0) traj.records.push_back(make_record(t, c, phys, k1));
            if (last || step % cfg_.snapshot_stride == 0) {
                traj.snapshot_times.push_back(t);
                traj.snapshots.emplace_back(grid_, phys);
            }
            if (last) break;

            const double speed = op_.max_speed(phys, t);
            const auto sub = static_cast<std::size_t>(
                std::max(1.0, std::ceil(speed * h / dx / cfg_.cfl_safety)));
            const double hs = h / static_cast<double>(sub);
            for (std::size_t s = 0; s < sub; ++s) {
                const double ts = t + static_cast<double>(s) * hs;
                if (s > 0) {
                    fft_.inverse(c, phys);
                    op_.rhs(c, phys, ts, k1);
                }
                advance(c, ts, hs, k1);
            }
            traj.substeps += sub;
            fft_.inverse(c, phys);

            double linf = 0.0;
            bool finite = true;
            for (double v : phys) {
                if (!std::isfinite(v)) {
                    finite = false;
                    break;
                }
                linf = std::max(linf, std::abs(v));
            }
            const double t_next = t0 + static_cast<double>(step + 1) * h;
            if (!finite) {
                traj.status = RunStatus::NonFinite;
                traj.message = "non-finite values at t = " + std::to_string(t_next);
                break;
            }
            if (linf > cfg_.blowup_linf) {
                traj.status = RunStatus::Blowup;
                traj.message = "sup norm " + std::to_string(linf) + " exceeded blowup threshold at t = " +
                               std::to_string(t_next);
                op_.rhs(c, phys, t_next, k1);
                traj.records.push_back(make_record(t_next, c, phys, k1));
                traj.snapshot_times.push_back(t_next);
                traj.snapshots.emplace_back(grid_, phys);
                break;
            }
        }
        if (!traj.completed()) traj.t_end = traj.records.back().t;
        return traj;
    }

private:
    void advance(Spectrum& c, double t, double h, const Spectrum& k1) {
        if (cfg_.scheme == Scheme::IMEX_IF_RK3) {
            advance_if_rk3(c, t, h, k1);
        } else {
            advance_cn_ab2(c, h, k1);
        }
    }

    // Heun's third-order method in integrating-factor form; the stage
    // abscissae 0, 1/3, 2/3 are non-decreasing so every factor is damping.
    void advance_if_rk3(Spectrum& c, double t, double h, const Spectrum& k1) {
        const double nu = cfg_.nu;
        const std::size_t M = c.size();
        e1_.resize(M);
        e3_.resize(M);
        e23_.resize(M);
        for (std::size_t m = 0; m < M; ++m) {
            e1_[m] = std::exp(-nu * k2_[m] * h);
            e3_[m] = std::exp(-nu * k2_[m] * h / 3.0);
            e23_[m] = std::exp(-nu * k2_[m] * 2.0 * h / 3.0);
        }
        stage_.resize(M);
        k2s_.resize(M);
        k3s_.resize(M);
        stage_phys_.resize(n_);

        for (std::size_t m = 0; m < M; ++m) stage_[m] = e3_[m] * (c[m] + (h / 3.0) * k1[m]);
        fft_.inverse(stage_, stage_phys_);
        op_.rhs(stage_, stage_phys_, t + h / 3.0, k2s_);

        for (std::size_t m = 0; m < M; ++m) stage_[m] = e23_[m] * c[m] + (2.0 * h / 3.0) * e3_[m] * k2s_[m];
        fft_.inverse(stage_, stage_phys_);
        op_.rhs(stage_, stage_phys_, t + 2.0 * h / 3.0, k3s_);

        for (std::size_t m = 0; m < M; ++m) {
            c[m] = e1_[m] * c[m] + h * (0.25 * e1_[m] * k1[m] + 0.75 * e3_[m] * k3s_[m]);
        }
    }

    void advance_cn_ab2(Spectrum& c, double h, const Spectrum& k1) {
        const double nu = cfg_.nu;
        const std::size_t M = c.size();
        double w_now = 1.0, w_prev = 0.0;
        if (have_history_) {
            const double omega = h / h_prev_;
            w_now = 1.0 + 0.5 * omega;
            w_prev = -0.5 * omega;
        }
        for (std::size_t m = 0; m < M; ++m) {
            const double a = 0.5 * nu * k2_[m] * h;
            Complex explicit_part = w_now * k1[m];
            if (have_history_) explicit_part += w_prev * n_prev_[m];
            c[m] = ((1.0 - a) * c[m] + h * explicit_part) / (1.0 + a);
        }
        n_prev_ = k1;
        h_prev_ = h;
        have_history_ = true;
    }

    NormRecord make_record(double t, const Spectrum& c, const std::vector<double>& phys,
                           const Spectrum& nonlinear) {
        dt_spec_.resize(c.size());
        for (std::size_t m = 0; m < c.size(); ++m) dt_spec_[m] = -cfg_.nu * k2_[m] * c[m] + nonlinear[m];
        return norm_record(t, c, phys, op_.forcing(t), dt_spec_);
    }

    SolverConfig cfg_;
    Op& op_;
    std::size_t n_;
    FourierTransform fft_;
    PeriodicGrid grid_;
    std::vector<double> k2_;
    std::vector<double> e1_, e3_, e23_;
    Spectrum stage_, k2s_, k3s_, dt_spec_;
    std::vector<double> stage_phys_;
    Spectrum n_prev_;
    double h_prev_ = 0.0;
    bool have_history_ = false;
};

}  // namespace detail
}  // namespace burgers_lab
