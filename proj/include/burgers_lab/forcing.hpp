#pragma once

#include "burgers_lab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace burgers_lab {

enum class ForcingKind { Zero, Steady, TimePeriodic, Stochastic };

inline const char* to_string(ForcingKind kind) {
    switch (kind) {
        case ForcingKind::Zero: return "zero";
        case ForcingKind::Steady: return "steady";
        case ForcingKind::TimePeriodic: return "time_periodic";
        case ForcingKind::Stochastic: return "stochastic";
    }
    return "?";
}

/// Parameters of h(t,x) = sum_{m=1..modes} alpha_m [xi_m(t) cos(2 pi m x) + eta_m(t) sin(2 pi m x)]
/// with alpha_m = amplitude * m^{-decay_p} and xi_m, eta_m stationary
/// Ornstein-Uhlenbeck processes of unit variance and reversion rate lambda.
struct StochasticSpec {
    int modes = 8;
    double decay_p = 3.0;
    double lambda = 1.0;
    double amplitude = 1.0;
    double dt = 1e-3;       // path grid step
    double horizon = 10.0;  // path is generated on [0, horizon]
};

namespace detail {

/// Mode coefficients c_1..c_M of a zero-mean profile: h(x) = sum 2 Re(c_m e^{2 pi i m x}),
/// except that a source-grid Nyquist coefficient is counted once.
struct ModeProfile {
    std::vector<Complex> coeffs;  // index 0 is mode 1
    std::size_t source_n = 0;     // grid the profile came from, 0 if none

    std::size_t native_n() const { return source_n == 0 ? 2 * (coeffs.size() + 1) : source_n; }

    Spectrum native_spectrum() const {
        Spectrum full(native_n() / 2 + 1, Complex(0.0, 0.0));
        for (std::size_t m = 1; m <= coeffs.size() && m < full.size(); ++m) full[m] = coeffs[m - 1];
        return full;
    }

    Spectrum to_spectrum(std::size_t n) const {
        Spectrum out = resample_spectrum(native_spectrum(), native_n(), n);
        out[0] = Complex(0.0, 0.0);
        return out;
    }

    double h2_norm() const { return sobolev_parts(native_spectrum(), native_n()).h2(); }
};

inline ModeProfile profile_from_field(const Field& g) {
    const Spectrum spec = spectrum_of(g);
    ModeProfile p;
    p.source_n = g.grid().n();
    p.coeffs.assign(spec.begin() + 1, spec.end());
    return p;
}

}  // namespace detail

/// Pre-generated Ornstein-Uhlenbeck coefficient paths. Immutable once built.
class StochasticPath {
public:
    StochasticPath(const StochasticSpec& spec, std::uint64_t seed) : spec_(spec), seed_(seed) {
        if (spec.modes < 1) throw std::invalid_argument("stochastic forcing needs at least one mode");
        if (!(spec.lambda > 0.0)) throw std::invalid_argument("reversion rate lambda must be positive");
        if (!(spec.decay_p >= 3.0)) throw std::invalid_argument("decay exponent p must be at least 3");
        if (!(spec.dt > 0.0)) throw std::invalid_argument("path step dt must be positive");
        if (!(spec.horizon > 0.0)) throw std::invalid_argument("path horizon must be positive");
        if (!(spec.amplitude >= 0.0)) throw std::invalid_argument("amplitude must be non-negative");

        steps_ = static_cast<std::size_t>(std::ceil(spec.horizon / spec.dt - 1e-9));
        const auto m = static_cast<std::size_t>(spec.modes);
        alpha_.resize(m);
        for (std::size_t k = 0; k < m; ++k) {
            alpha_[k] = spec.amplitude * std::pow(static_cast<double>(k + 1), -spec.decay_p);
        }
        xi_.assign((steps_ + 1) * m, 0.0);
        eta_.assign((steps_ + 1) * m, 0.0);

        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        // Exact transition: X' = e^{-lambda dt} X + sqrt(1 - e^{-2 lambda dt}) Z.
        const double decay = std::exp(-spec.lambda * spec.dt);
        const double kick = std::sqrt(-std::expm1(-2.0 * spec.lambda * spec.dt));
        for (std::size_t k = 0; k < m; ++k) {
            xi_[k] = normal(rng);
            eta_[k] = normal(rng);
        }
        for (std::size_t s = 1; s <= steps_; ++s) {
            for (std::size_t k = 0; k < m; ++k) {
                xi_[s * m + k] = decay * xi_[(s - 1) * m + k] + kick * normal(rng);
                eta_[s * m + k] = decay * eta_[(s - 1) * m + k] + kick * normal(rng);
            }
        }
    }

    const StochasticSpec& spec() const { return spec_; }
    std::uint64_t seed() const { return seed_; }
    double horizon() const { return static_cast<double>(steps_) * spec_.dt; }
    std::size_t steps() const { return steps_; }
    double alpha(std::size_t mode_index) const { return alpha_[mode_index]; }

    /// Mode coefficients at time t, linearly interpolated between path nodes.
    std::vector<Complex> coefficients(double t) const {
        if (t < 0.0) {
            throw std::out_of_range("stochastic forcing is generated forward from t = 0; t = " +
                                    std::to_string(t) + " precedes the path");
        }
        const double pos = t / spec_.dt;
        if (pos > static_cast<double>(steps_) + 1e-9) {
            throw std::out_of_range("stochastic forcing queried at t = " + std::to_string(t) +
                                    " beyond the generated horizon " + std::to_string(horizon()));
        }
        auto s = static_cast<std::size_t>(std::floor(pos));
        if (s >= steps_) s = steps_ == 0 ? 0 : steps_ - 1;
        const double theta = steps_ == 0 ? 0.0 : std::clamp(pos - static_cast<double>(s), 0.0, 1.0);
        const auto m = alpha_.size();
        std::vector<Complex> out(m);
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t a = s * m + k;
            const std::size_t b = std::min(s + 1, steps_) * m + k;
            const double xi = (1.0 - theta) * xi_[a] + theta * xi_[b];
            const double eta = (1.0 - theta) * eta_[a] + theta * eta_[b];
            out[k] = 0.5 * alpha_[k] * Complex(xi, -eta);
        }
        return out;
    }

    /// Node time and raw (xi, eta) pairs, for CSV export.
    double node_time(std::size_t s) const { return static_cast<double>(s) * spec_.dt; }
    double xi(std::size_t s, std::size_t k) const { return xi_[s * alpha_.size() + k]; }
    double eta(std::size_t s, std::size_t k) const { return eta_[s * alpha_.size() + k]; }

private:
    StochasticSpec spec_;
    std::uint64_t seed_;
    std::size_t steps_ = 0;
    std::vector<double> alpha_;
    std::vector<double> xi_, eta_;
};

/// Zero-spatial-mean external force h(t, x).
class ForcingModel {
public:
    static ForcingModel zero() { return ForcingModel(ForcingKind::Zero); }

    /// Time-independent force; any mean of the profile is discarded.
    static ForcingModel steady(const Field& profile) {
        ForcingModel fm(ForcingKind::Steady);
        fm.profiles_.push_back(detail::profile_from_field(profile));
        return fm;
    }

    /// Profiles placed at phases k * period / K and interpolated linearly, cyclically.
    static ForcingModel time_periodic(const std::vector<Field>& profiles, double period) {
        if (profiles.empty()) throw std::invalid_argument("time_periodic forcing needs profiles");
        if (!(period > 0.0)) throw std::invalid_argument("forcing period must be positive");
        ForcingModel fm(ForcingKind::TimePeriodic);
        for (const auto& p : profiles) fm.profiles_.push_back(detail::profile_from_field(p));
        fm.period_ = period;
        return fm;
    }

    static ForcingModel stochastic(std::shared_ptr<const StochasticPath> path) {
        ForcingModel fm(ForcingKind::Stochastic);
        fm.path_ = std::move(path);
        return fm;
    }

    ForcingKind kind() const { return kind_; }
    double period() const { return period_; }
    const StochasticPath* path() const { return path_.get(); }

    /// Earliest time at which the force can be evaluated.
    double defined_from() const {
        return kind_ == ForcingKind::Stochastic ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    double defined_until() const {
        return kind_ == ForcingKind::Stochastic ? path_->horizon()
                                                : std::numeric_limits<double>::infinity();
    }

    /// Half spectrum of h(t, .) on an n-point grid; mode 0 is exactly zero.
    Spectrum spectrum(double t, std::size_t n) const {
        switch (kind_) {
            case ForcingKind::Zero:
                return Spectrum(n / 2 + 1, Complex(0.0, 0.0));
            case ForcingKind::Steady:
                return profiles_[0].to_spectrum(n);
            case ForcingKind::TimePeriodic: {
                const auto [i0, i1, theta] = phase(t);
                Spectrum a = profiles_[i0].to_spectrum(n);
                const Spectrum b = profiles_[i1].to_spectrum(n);
                for (std::size_t m = 0; m < a.size(); ++m) a[m] = (1.0 - theta) * a[m] + theta * b[m];
                return a;
            }
            case ForcingKind::Stochastic: {
                detail::ModeProfile p;
                p.coeffs = path_->coefficients(t);
                return p.to_spectrum(n);
            }
        }
        throw std::logic_error("unknown forcing kind");
    }

    /// Sobolev H^2 norm of h(t, .), independent of any grid.
    double h2_norm(double t) const {
        switch (kind_) {
            case ForcingKind::Zero: return 0.0;
            case ForcingKind::Steady: return profiles_[0].h2_norm();
            case ForcingKind::TimePeriodic: {
                const auto [i0, i1, theta] = phase(t);
                detail::ModeProfile mix = profiles_[i0];
                const auto& other = profiles_[i1];
                const std::size_t len = std::max(mix.coeffs.size(), other.coeffs.size());
                mix.coeffs.resize(len, Complex(0.0, 0.0));
                for (std::size_t k = 0; k < len; ++k) {
                    const Complex b = k < other.coeffs.size() ? other.coeffs[k] : Complex(0.0, 0.0);
                    mix.coeffs[k] = (1.0 - theta) * mix.coeffs[k] + theta * b;
                }
                mix.source_n = std::max(mix.source_n, other.source_n);
                return mix.h2_norm();
            }
            case ForcingKind::Stochastic: {
                detail::ModeProfile p;
                p.coeffs = path_->coefficients(t);
                return p.h2_norm();
            }
        }
        return 0.0;
    }

private:
    explicit ForcingModel(ForcingKind kind) : kind_(kind) {}

    struct Phase {
        std::size_t i0, i1;
        double theta;
    };
    Phase phase(double t) const {
        const std::size_t k = profiles_.size();
        double s = std::fmod(t, period_);
        if (s < 0.0) s += period_;
        const double pos = s / period_ * static_cast<double>(k);
        auto i0 = static_cast<std::size_t>(std::floor(pos));
        if (i0 >= k) i0 = k - 1;
        return {i0, (i0 + 1) % k, pos - static_cast<double>(i0)};
    }

    ForcingKind kind_;
    std::vector<detail::ModeProfile> profiles_;
    double period_ = 1.0;
    std::shared_ptr<const StochasticPath> path_;
};

inline ForcingModel make_stochastic_forcing(const StochasticSpec& spec, std::uint64_t seed) {
    return ForcingModel::stochastic(std::make_shared<const StochasticPath>(spec, seed));
}

inline Field eval_forcing(const ForcingModel& fm, double t, const PeriodicGrid& grid) {
    return field_from_spectrum(grid, fm.spectrum(t, grid.n()));
}

/// Supremum of |h| over [t0, t1] x S. Time interpolation is linear, so the
/// sup over a segment is attained at the node times that are sampled here.
inline double forcing_sup_norm(const ForcingModel& fm, double t0, double t1,
                               const PeriodicGrid& grid) {
    std::vector<double> times{t0, t1};
    if (fm.kind() == ForcingKind::TimePeriodic) {
        const double step = fm.period() / 64.0;
        for (double t = t0; t < t1; t += step) times.push_back(t);
    } else if (fm.kind() == ForcingKind::Stochastic) {
        const double dt = fm.path()->spec().dt;
        for (double t = std::ceil(t0 / dt) * dt; t < t1; t += dt) times.push_back(t);
    }
    double sup = 0.0;
    for (double t : times) sup = std::max(sup, interpolant_sup_norm(eval_forcing(fm, t, grid)));
    return sup;
}

struct ForcingBudget {
    double horizon = 0.0;
    double K_estimate = 0.0;
    std::vector<double> scan_times;      // window start times t
    std::vector<double> window_sups;     // max_{t <= s <= t+1} ||h(s)||_2
    std::vector<double> running_average; // (1/t) int_0^t window_sup
};

/// Finite-horizon proxy for K = limsup (1/T) int_0^T max_{t<=s<=t+1} ||h(s)||_2 dt,
/// averaging the windowed maximum over window starts in [0, T - 1].
inline ForcingBudget forcing_budget(const ForcingModel& fm, double T, double dt_scan) {
    if (!(T >= 2.0)) throw std::invalid_argument("forcing_budget requires T >= 2");
    if (!(dt_scan > 0.0)) throw std::invalid_argument("forcing_budget requires dt_scan > 0");

    const auto total = static_cast<std::size_t>(std::llround(T / dt_scan));
    const auto window = static_cast<std::size_t>(std::llround(1.0 / dt_scan));
    std::vector<double> norms(total + 1);
    for (std::size_t i = 0; i <= total; ++i) norms[i] = fm.h2_norm(static_cast<double>(i) * dt_scan);

    ForcingBudget out;
    out.horizon = T;
    const std::size_t starts = total - window + 1;
    std::deque<std::size_t> dq;  // indices with decreasing norms
    double mean = 0.0;
    std::size_t next = 0;
    for (std::size_t s = 0; s < starts; ++s) {
        const std::size_t end = s + window;
        while (next <= end) {
            while (!dq.empty() && norms[dq.back()] <= norms[next]) dq.pop_back();
            dq.push_back(next);
            ++next;
        }
        while (dq.front() < s) dq.pop_front();
        const double wmax = norms[dq.front()];
        mean += (wmax - mean) / static_cast<double>(s + 1);
        out.scan_times.push_back(static_cast<double>(s) * dt_scan);
        out.window_sups.push_back(wmax);
        out.running_average.push_back(mean);
    }
    out.K_estimate = mean;
    return out;
}

}  // namespace burgers_lab
