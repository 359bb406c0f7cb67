#pragma once

#include "burgers_lab/flux.hpp"
#include "burgers_lab/forcing.hpp"
#include "burgers_lab/integrator.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace burgers_lab {

namespace detail {

/// N(u, t) = -d/dx P f(u) + h(t), with P the optional 2/3-rule projector.
class BurgersOperator {
public:
    BurgersOperator(const FluxModel& flux, const ForcingModel& forcing, std::size_t n, bool dealias)
        : flux_(flux), forcing_(forcing), n_(n), dealias_(dealias), fft_(n), fvals_(n),
          fspec_(n / 2 + 1) {
        if (forcing_.kind() == ForcingKind::Zero || forcing_.kind() == ForcingKind::Steady) {
            cached_forcing_ = forcing_.spectrum(0.0, n_);
        }
    }

    void rhs(const Spectrum&, const std::vector<double>& phys, double t, Spectrum& out) {
        out.resize(n_ / 2 + 1);
        if (flux_.kind() == FluxKind::Zero) {
            std::fill(out.begin(), out.end(), Complex(0.0, 0.0));
        } else {
            for (std::size_t j = 0; j < n_; ++j) fvals_[j] = flux_.f(phys[j]);
            fft_.forward(fvals_, fspec_);
            if (dealias_) apply_dealias(fspec_, n_);
            differentiate_spectrum(fspec_, n_, 1);
            for (std::size_t m = 0; m < out.size(); ++m) out[m] = -fspec_[m];
        }
        const Spectrum& h = forcing(t);
        for (std::size_t m = 1; m < out.size(); ++m) out[m] += h[m];
    }

    double max_speed(const std::vector<double>& phys, double) const {
        double s = 0.0;
        for (double u : phys) s = std::max(s, std::abs(flux_.fp(u)));
        return s;
    }

    const Spectrum& forcing(double t) {
        if (!cached_forcing_.empty()) return cached_forcing_;
        scratch_forcing_ = forcing_.spectrum(t, n_);
        return scratch_forcing_;
    }

private:
    const FluxModel& flux_;
    const ForcingModel& forcing_;
    std::size_t n_;
    bool dealias_;
    FourierTransform fft_;
    std::vector<double> fvals_;
    Spectrum fspec_;
    Spectrum cached_forcing_, scratch_forcing_;
};

}  // namespace detail

/// Integrates u_t - nu u_xx + (f(u))_x = h from t0 to T. Runs that exceed
/// blowup_linf or produce non-finite values stop early with the status set
/// and the last finite state stored.
inline Trajectory solve(const Field& u0, const ForcingModel& fm, const FluxModel& flux,
                        const SolverConfig& cfg, double t0, double T) {
    cfg.validate();
    if (t0 < fm.defined_from() - 1e-12 || T > fm.defined_until() + 1e-9) {
        throw std::out_of_range("forcing is not defined on the requested time window");
    }
    detail::BurgersOperator op(flux, fm, static_cast<std::size_t>(cfg.n), cfg.dealias);
    detail::SpectralIntegrator<detail::BurgersOperator> integrator(cfg, op);
    return integrator.run(u0, t0, T);
}

}  // namespace burgers_lab
