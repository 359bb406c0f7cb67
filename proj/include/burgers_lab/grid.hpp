#pragma once

#include "burgers_lab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace burgers_lab {

/// Thrown when an operation would produce NaN or Inf values.
class NonFiniteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Uniform grid on the unit circle, nodes x_j = j/n.
class PeriodicGrid {
public:
    static PeriodicGrid make(long n) {
        if (n % 2 != 0) throw std::invalid_argument("odd resolution rejected");
        if (n < 8) throw std::invalid_argument("resolution must be at least 8");
        return PeriodicGrid(static_cast<std::size_t>(n));
    }

    std::size_t n() const { return n_; }
    double dx() const { return 1.0 / static_cast<double>(n_); }
    double node(std::size_t j) const { return static_cast<double>(j) / static_cast<double>(n_); }

    bool operator==(const PeriodicGrid&) const = default;

private:
    explicit PeriodicGrid(std::size_t n) : n_(n) {}
    std::size_t n_;
};

inline PeriodicGrid make_grid(long n) { return PeriodicGrid::make(n); }

/// Grid function with finite nodal values.
class Field {
public:
    explicit Field(PeriodicGrid grid) : grid_(grid), values_(grid.n(), 0.0) {}

    Field(PeriodicGrid grid, std::vector<double> values)
        : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.n()) {
            throw std::invalid_argument("field length does not match grid");
        }
        require_finite("Field");
    }

    static Field constant(PeriodicGrid grid, double value) {
        return Field(grid, std::vector<double>(grid.n(), value));
    }

    const PeriodicGrid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t j) const { return values_[j]; }

    Field& operator+=(const Field& other) {
        check_same_grid(other);
        for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += other.values_[j];
        require_finite("operator+=");
        return *this;
    }
    Field& operator-=(const Field& other) {
        check_same_grid(other);
        for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= other.values_[j];
        require_finite("operator-=");
        return *this;
    }
    Field& operator*=(double s) {
        for (auto& v : values_) v *= s;
        require_finite("operator*=");
        return *this;
    }
    Field& operator+=(double s) {
        for (auto& v : values_) v += s;
        require_finite("operator+=");
        return *this;
    }

    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(double s, Field a) { return a *= s; }
    friend Field operator*(Field a, double s) { return a *= s; }
    friend Field operator+(Field a, double s) { return a += s; }

    void check_same_grid(const Field& other) const {
        if (!(grid_ == other.grid_)) throw std::invalid_argument("fields live on different grids");
    }

private:
    void require_finite(const char* where) const {
        for (double v : values_) {
            if (!std::isfinite(v)) throw NonFiniteError(std::string(where) + ": non-finite value");
        }
    }

    PeriodicGrid grid_;
    std::vector<double> values_;
};

enum class NormKind { L1, L2, Linf, H1, H2 };

inline const char* to_string(NormKind kind) {
    switch (kind) {
        case NormKind::L1: return "L1";
        case NormKind::L2: return "L2";
        case NormKind::Linf: return "Linf";
        case NormKind::H1: return "H1";
        case NormKind::H2: return "H2";
    }
    return "?";
}

inline Field sample(const PeriodicGrid& grid, const std::function<double(double)>& fn) {
    std::vector<double> values(grid.n());
    for (std::size_t j = 0; j < grid.n(); ++j) {
        values[j] = fn(grid.node(j));
        if (!std::isfinite(values[j])) {
            throw NonFiniteError("sample: non-finite value at node " + std::to_string(j));
        }
    }
    return Field(grid, std::move(values));
}

inline Spectrum spectrum_of(const Field& f) {
    return FourierTransform(f.grid().n()).forward(f.values());
}

inline Field field_from_spectrum(const PeriodicGrid& grid, std::span<const Complex> spec) {
    return Field(grid, FourierTransform(grid.n()).inverse(spec));
}

/// Spectral derivative of order 1..4.
inline Field derivative(const Field& f, int order) {
    if (order < 1 || order > 4) throw std::invalid_argument("derivative order must be in 1..4");
    Spectrum spec = spectrum_of(f);
    differentiate_spectrum(spec, f.grid().n(), order);
    return field_from_spectrum(f.grid(), spec);
}

/// Rectangle-rule mean, exact for trigonometric polynomials below Nyquist.
inline double mean_value(const Field& f) {
    double sum = 0.0;
    for (double v : f.values()) sum += v;
    return sum / static_cast<double>(f.size());
}

inline double inner_product(const Field& f, const Field& g) {
    f.check_same_grid(g);
    double sum = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) sum += f[j] * g[j];
    return sum / static_cast<double>(f.size());
}

/// Squared L2 norms of u, u', u'' from a half spectrum (Parseval).
struct SobolevParts {
    double l2sq = 0.0;
    double d1sq = 0.0;
    double d2sq = 0.0;

    double h1() const { return std::sqrt(l2sq + d1sq); }
    double h2() const { return std::sqrt(l2sq + d1sq + d2sq); }
};

inline SobolevParts sobolev_parts(std::span<const Complex> spec, std::size_t n) {
    const std::size_t nyquist = n / 2;
    SobolevParts parts;
    parts.l2sq = weighted_energy(spec, n, [](std::size_t) { return 1.0; });
    // First derivative drops the Nyquist mode; the second keeps it.
    parts.d1sq = weighted_energy(spec, n, [nyquist](std::size_t m) {
        if (m == nyquist) return 0.0;
        const double k = wavenumber(m);
        return k * k;
    });
    parts.d2sq = weighted_energy(spec, n, [](std::size_t m) {
        const double k = wavenumber(m);
        return k * k * k * k;
    });
    return parts;
}

inline double norm(const Field& f, NormKind kind) {
    switch (kind) {
        case NormKind::L1: {
            double sum = 0.0;
            for (double v : f.values()) sum += std::abs(v);
            return sum / static_cast<double>(f.size());
        }
        case NormKind::L2: {
            double sum = 0.0;
            for (double v : f.values()) sum += v * v;
            return std::sqrt(sum / static_cast<double>(f.size()));
        }
        case NormKind::Linf: {
            double m = 0.0;
            for (double v : f.values()) m = std::max(m, std::abs(v));
            return m;
        }
        case NormKind::H1:
            return sobolev_parts(spectrum_of(f), f.grid().n()).h1();
        case NormKind::H2:
            return sobolev_parts(spectrum_of(f), f.grid().n()).h2();
    }
    throw std::invalid_argument("unknown norm kind");
}

/// (max(w, 0), max(-w, 0)) nodewise.
inline std::pair<Field, Field> pos_neg_split(const Field& w) {
    std::vector<double> plus(w.size()), minus(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
        plus[j] = std::max(w[j], 0.0);
        minus[j] = std::max(-w[j], 0.0);
    }
    return {Field(w.grid(), std::move(plus)), Field(w.grid(), std::move(minus))};
}

inline double min_value(const Field& f) {
    return *std::min_element(f.values().begin(), f.values().end());
}

inline double max_value(const Field& f) {
    return *std::max_element(f.values().begin(), f.values().end());
}

/// Evaluates the trigonometric interpolant of a half spectrum at x, together
/// with its first two derivatives.
struct InterpolantValue {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

inline InterpolantValue evaluate_interpolant(std::span<const Complex> spec, std::size_t n,
                                             double x) {
    const std::size_t nyquist = n / 2;
    InterpolantValue out;
    out.value = spec[0].real();
    for (std::size_t m = 1; m < spec.size(); ++m) {
        const double k = wavenumber(m);
        const double c = std::cos(k * x), s = std::sin(k * x);
        const double re = spec[m].real(), im = spec[m].imag();
        // Nyquist contributes Re(c_N) cos(pi n x) once.
        const double mult = (m == nyquist) ? 1.0 : 2.0;
        const double im_used = (m == nyquist) ? 0.0 : im;
        const double val = re * c - im_used * s;
        const double der = -re * s - im_used * c;
        out.value += mult * val;
        out.d1 += mult * k * der;
        out.d2 += -mult * k * k * val;
    }
    return out;
}

/// Supremum of |trigonometric interpolant| over the circle: candidate maxima
/// on an oversampled grid are polished with Newton steps on the derivative.
inline double interpolant_sup_norm(const Field& f, std::size_t oversample = 8) {
    const std::size_t n = f.grid().n();
    const Spectrum spec = spectrum_of(f);
    const std::size_t nf = n * oversample;
    const Spectrum fine_spec = resample_spectrum(spec, n, nf);
    const std::vector<double> fine = FourierTransform(nf).inverse(fine_spec);

    double best = 0.0;
    for (double v : fine) best = std::max(best, std::abs(v));
    for (double v : f.values()) best = std::max(best, std::abs(v));

    const double h = 1.0 / static_cast<double>(nf);
    for (std::size_t j = 0; j < nf; ++j) {
        const double left = std::abs(fine[(j + nf - 1) % nf]);
        const double mid = std::abs(fine[j]);
        const double right = std::abs(fine[(j + 1) % nf]);
        if (mid < left || mid < right || mid < 0.5 * best) continue;
        double x = static_cast<double>(j) * h;
        for (int it = 0; it < 8; ++it) {
            const InterpolantValue v = evaluate_interpolant(spec, n, x);
            if (v.d2 == 0.0) break;
            const double step = v.d1 / v.d2;
            if (std::abs(step) > h) break;
            x -= step;
            if (std::abs(step) < 1e-15) break;
        }
        best = std::max(best, std::abs(evaluate_interpolant(spec, n, x).value));
    }
    return best;
}

}  // namespace burgers_lab
