#pragma once

// Closed-form reference solutions used as oracles. Everything here works with
// direct trigonometric sums rather than the FFT path used by the solvers.

#include "burgers_lab/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace burgers_lab::reference {

/// Half spectrum by direct summation, same normalisation as FourierTransform.
inline Spectrum naive_dft(std::span<const double> values) {
    const std::size_t n = values.size();
    Spectrum out(n / 2 + 1);
    for (std::size_t m = 0; m < out.size(); ++m) {
        double re = 0.0, im = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            // Reduce m*j mod n first so the angle stays accurate.
            const double angle = 2.0 * std::numbers::pi * static_cast<double>((m * j) % n) /
                                 static_cast<double>(n);
            re += values[j] * std::cos(angle);
            im -= values[j] * std::sin(angle);
        }
        out[m] = Complex(re, im) / static_cast<double>(n);
    }
    return out;
}

/// u(t) for u_t + a u_x = nu u_xx with constant a.
inline Field advection_diffusion(const Field& u0, double a, double nu, double t) {
    const std::size_t n = u0.grid().n();
    Spectrum spec = naive_dft(u0.values());
    for (std::size_t m = 0; m < spec.size(); ++m) {
        const double k = wavenumber(m);
        spec[m] *= std::exp(-nu * k * k * t) * std::exp(Complex(0.0, -k * a * t));
    }
    std::vector<double> values(n);
    for (std::size_t j = 0; j < n; ++j) values[j] = evaluate_interpolant(spec, n, u0.grid().node(j)).value;
    return Field(u0.grid(), std::move(values));
}

inline Field heat(const Field& u0, double nu, double t) { return advection_diffusion(u0, 0.0, nu, t); }

/// Viscous Burgers u_t + u u_x = nu u_xx on the circle via the Cole-Hopf
/// transform. The zero-mean part U is recovered from phi_t = nu phi_xx,
/// U = -2 nu phi_x / phi, and a mean c enters by the Galilean shift
/// u(t, x) = c + U(t, x - c t).
class ColeHopf {
public:
    ColeHopf(const Field& u0, double nu, std::size_t n_ref = 1024) : nu_(nu), n_ref_(n_ref) {
        if (!(nu > 0.0)) throw std::invalid_argument("Cole-Hopf reference needs nu > 0");
        const std::size_t n0 = u0.grid().n();
        const Spectrum u_spec = naive_dft(u0.values());
        mean_ = u_spec[0].real();

        // Potential Phi(x) = int_0^x (u0 - mean); the Nyquist mode of u0 has no
        // periodic antiderivative contribution beyond its sine part.
        std::vector<double> phi0(n_ref_);
        for (std::size_t j = 0; j < n_ref_; ++j) {
            const double x = static_cast<double>(j) / static_cast<double>(n_ref_);
            double potential = 0.0;
            for (std::size_t m = 1; m < u_spec.size(); ++m) {
                const double k = wavenumber(m);
                const double re = u_spec[m].real(), im = u_spec[m].imag();
                const bool nyq = (m == n0 / 2);
                const double mult = nyq ? 1.0 : 2.0;
                const double im_used = nyq ? 0.0 : im;
                // int_0^x Re((re + i im) e^{ikx}) dx
                potential += mult * (re * std::sin(k * x) + im_used * (std::cos(k * x) - 1.0)) / k;
            }
            phi0[j] = std::exp(-potential / (2.0 * nu_));
        }
        phi_spec_ = naive_dft(phi0);
    }

    double mean() const { return mean_; }

    double value(double t, double x) const {
        const double y = x - mean_ * t;
        double phi = phi_spec_[0].real();
        double dphi = 0.0;
        const std::size_t nyq = n_ref_ / 2;
        for (std::size_t m = 1; m < phi_spec_.size(); ++m) {
            const double k = wavenumber(m);
            const double decay = std::exp(-nu_ * k * k * t);
            if (decay < 1e-300) break;
            const double re = phi_spec_[m].real() * decay, im = phi_spec_[m].imag() * decay;
            const double mult = (m == nyq) ? 1.0 : 2.0;
            const double im_used = (m == nyq) ? 0.0 : im;
            const double c = std::cos(k * y), s = std::sin(k * y);
            phi += mult * (re * c - im_used * s);
            dphi += mult * k * (-re * s - im_used * c);
        }
        return mean_ - 2.0 * nu_ * dphi / phi;
    }

    Field at(double t, const PeriodicGrid& grid) const {
        std::vector<double> values(grid.n());
        for (std::size_t j = 0; j < grid.n(); ++j) values[j] = value(t, grid.node(j));
        return Field(grid, std::move(values));
    }

private:
    double nu_;
    std::size_t n_ref_;
    double mean_ = 0.0;
    Spectrum phi_spec_;
};

}  // namespace burgers_lab::reference
