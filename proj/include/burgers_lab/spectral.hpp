#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace burgers_lab {

using Complex = std::complex<double>;

/// Half spectrum of a real grid function: coefficients c_m for m = 0..n/2,
/// normalised so that u_j = sum_m c_m exp(2 pi i m j / n) over the full
/// Hermitian spectrum.
using Spectrum = std::vector<Complex>;

namespace detail {

struct FftwPlans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

// The FFTW planner is not re-entrant; executing an existing plan on new
// arrays is. Plans are created once per size and live for the process.
inline const FftwPlans& plans_for(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, FftwPlans> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    const int len = static_cast<int>(n);
    double* real = fftw_alloc_real(n);
    fftw_complex* cplx = fftw_alloc_complex(n / 2 + 1);
    FftwPlans p;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    p.r2c = fftw_plan_dft_r2c_1d(len, real, cplx, flags);
    p.c2r = fftw_plan_dft_c2r_1d(len, cplx, real, flags | FFTW_DESTROY_INPUT);
    fftw_free(cplx);
    fftw_free(real);
    if (p.r2c == nullptr || p.c2r == nullptr) {
        throw std::runtime_error("FFTW planning failed");
    }
    return cache.emplace(n, p).first->second;
}

}  // namespace detail

/// Real-to-complex transform pair for one grid size.
class FourierTransform {
public:
    explicit FourierTransform(std::size_t n) : n_(n), plans_(&detail::plans_for(n)) {}

    std::size_t size() const { return n_; }
    std::size_t modes() const { return n_ / 2 + 1; }

    /// c_m = (1/n) sum_j u_j exp(-2 pi i m j / n)
    void forward(std::span<const double> in, std::span<Complex> out) const {
        check(in.size() == n_ && out.size() == modes());
        fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(in.data()),
                             reinterpret_cast<fftw_complex*>(out.data()));
        const double scale = 1.0 / static_cast<double>(n_);
        for (auto& c : out) c *= scale;
    }

    void inverse(std::span<const Complex> in, std::span<double> out) const {
        check(in.size() == modes() && out.size() == n_);
        // c2r overwrites its input.
        scratch_.assign(in.begin(), in.end());
        fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(scratch_.data()),
                             out.data());
    }

    Spectrum forward(std::span<const double> in) const {
        Spectrum out(modes());
        forward(in, out);
        return out;
    }

    std::vector<double> inverse(std::span<const Complex> in) const {
        std::vector<double> out(n_);
        inverse(in, out);
        return out;
    }

private:
    static void check(bool ok) {
        if (!ok) throw std::invalid_argument("FourierTransform: array size mismatch");
    }

    std::size_t n_;
    const detail::FftwPlans* plans_;
    mutable std::vector<Complex> scratch_;
};

/// Angular wavenumber 2 pi m.
inline double wavenumber(std::size_t m) {
    return 2.0 * std::numbers::pi * static_cast<double>(m);
}

/// Largest mode kept by the 2/3 rule.
inline std::size_t dealias_cutoff(std::size_t n) { return n / 3; }

inline void apply_dealias(std::span<Complex> spec, std::size_t n) {
    const std::size_t kmax = dealias_cutoff(n);
    for (std::size_t m = kmax + 1; m < spec.size(); ++m) spec[m] = Complex(0.0, 0.0);
}

/// Multiply by (2 pi i m)^order in place; the unpaired Nyquist mode is zeroed
/// for odd orders.
inline void differentiate_spectrum(std::span<Complex> spec, std::size_t n, int order) {
    const std::size_t nyquist = n / 2;
    for (std::size_t m = 0; m < spec.size(); ++m) {
        if (order % 2 == 1 && m == nyquist) {
            spec[m] = Complex(0.0, 0.0);
            continue;
        }
        const Complex ik(0.0, wavenumber(m));
        Complex factor(1.0, 0.0);
        for (int k = 0; k < order; ++k) factor *= ik;
        spec[m] *= factor;
    }
}

/// sum over the full Hermitian spectrum of weight(m) |c_m|^2; this is the
/// rectangle-rule mean of the product of the corresponding grid functions.
template <class Weight>
double weighted_energy(std::span<const Complex> spec, std::size_t n, Weight weight) {
    const std::size_t nyquist = n / 2;
    double sum = 0.0;
    for (std::size_t m = 0; m < spec.size(); ++m) {
        const double mult = (m == 0 || m == nyquist) ? 1.0 : 2.0;
        sum += mult * weight(m) * std::norm(spec[m]);
    }
    return sum;
}

/// Rectangle-rule inner product (1/n) sum_j f_j g_j computed from spectra.
inline double spectral_inner(std::span<const Complex> f, std::span<const Complex> g,
                             std::size_t n) {
    const std::size_t nyquist = n / 2;
    double sum = 0.0;
    for (std::size_t m = 0; m < f.size(); ++m) {
        const double mult = (m == 0 || m == nyquist) ? 1.0 : 2.0;
        sum += mult * (f[m] * std::conj(g[m])).real();
    }
    return sum;
}

/// Change resolution of a half spectrum by truncation or zero padding.
/// A source Nyquist coefficient becomes an ordinary (paired) mode when
/// padding, so it is halved to represent the same cosine.
inline Spectrum resample_spectrum(std::span<const Complex> src, std::size_t n_from,
                                  std::size_t n_to) {
    Spectrum out(n_to / 2 + 1, Complex(0.0, 0.0));
    const std::size_t nyq_from = n_from / 2;
    const std::size_t nyq_to = n_to / 2;
    const std::size_t count = std::min(src.size(), out.size());
    for (std::size_t m = 0; m < count; ++m) {
        Complex c = src[m];
        if (m == nyq_from && n_to > n_from && m != 0) c *= 0.5;
        if (m == nyq_to && n_to < n_from && m != 0) c = Complex(2.0 * c.real(), 0.0);
        out[m] = c;
    }
    return out;
}

}  // namespace burgers_lab
