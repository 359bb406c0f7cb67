#pragma once

#include "burgers_lab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace burgers_lab {

/// Gauss-Legendre nodes and weights on [0, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussRule gauss_legendre_unit(int points) {
    if (points < 1) throw std::invalid_argument("quadrature needs at least one point");
    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(points));
    rule.weights.resize(static_cast<std::size_t>(points));
    const int n = points;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            const double pn = (n == 1) ? x : p1;
            const double pnm1 = (n == 1) ? 1.0 : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = 0.5 * (1.0 - x);
        rule.nodes[hi] = 0.5 * (1.0 + x);
        rule.weights[lo] = 0.5 * w;
        rule.weights[hi] = 0.5 * w;
    }
    return rule;
}

enum class FluxKind { Zero, Linear, Quadratic, Polynomial, Custom };

inline const char* to_string(FluxKind kind) {
    switch (kind) {
        case FluxKind::Zero: return "zero";
        case FluxKind::Linear: return "linear";
        case FluxKind::Quadratic: return "quadratic";
        case FluxKind::Polynomial: return "polynomial";
        case FluxKind::Custom: return "custom";
    }
    return "?";
}

struct ConvexityResult {
    bool holds = false;
    double observed_min_fpp = 0.0;
};

/// Flux f with first and second derivatives. The optional shift evaluates
/// f(u - shift), which is how a mean offset c is absorbed into the flux.
class FluxModel {
public:
    using Fn = std::function<double(double)>;

    static FluxModel zero() { return FluxModel(FluxKind::Zero, {}, 0.0); }
    static FluxModel linear(double c) { return FluxModel(FluxKind::Linear, {0.0, c}, 0.0); }
    static FluxModel quadratic(double sigma_floor = 1.0) {
        return FluxModel(FluxKind::Quadratic, {0.0, 0.0, 0.5}, sigma_floor);
    }
    /// f(u) = sum_k coeffs[k] u^k
    static FluxModel polynomial(std::vector<double> coeffs, double sigma_floor = 0.0,
                                double validation_range = 10.0) {
        while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
        if (coeffs.empty()) coeffs.push_back(0.0);
        FluxModel fm(FluxKind::Polynomial, std::move(coeffs), sigma_floor);
        fm.validation_range_ = validation_range;
        fm.validate();
        return fm;
    }
    static FluxModel custom(Fn f, Fn fp, Fn fpp, double sigma_floor = 0.0,
                            double validation_range = 10.0) {
        FluxModel fm(FluxKind::Custom, {}, sigma_floor);
        fm.custom_ = std::make_shared<CustomFns>(CustomFns{std::move(f), std::move(fp), std::move(fpp)});
        fm.validation_range_ = validation_range;
        fm.validate();
        return fm;
    }

    FluxKind kind() const { return kind_; }
    double sigma_floor() const { return sigma_floor_; }
    double shift() const { return shift_; }
    double validation_range() const { return validation_range_; }
    const std::vector<double>& coefficients() const { return coeffs_; }

    /// Polynomial degree, or -1 for custom fluxes.
    int degree() const {
        switch (kind_) {
            case FluxKind::Zero: return 0;
            case FluxKind::Linear: return 1;
            case FluxKind::Quadratic: return 2;
            case FluxKind::Polynomial: return static_cast<int>(coeffs_.size()) - 1;
            case FluxKind::Custom: return -1;
        }
        return -1;
    }

    /// Flux translated in its argument: u -> f(u - c).
    FluxModel shifted(double c) const {
        FluxModel copy = *this;
        copy.shift_ += c;
        return copy;
    }

    FluxModel with_sigma_floor(double sigma) const {
        FluxModel copy = *this;
        copy.sigma_floor_ = sigma;
        return copy;
    }

    double eval(double u, int deriv) const {
        if (deriv < 0 || deriv > 2) throw std::invalid_argument("flux derivative order must be 0, 1 or 2");
        const double r = eval_unchecked(u, deriv);
        if (!std::isfinite(r)) {
            throw NonFiniteError("flux evaluation is not finite at u = " + std::to_string(u));
        }
        return r;
    }

    double f(double u) const { return eval_unchecked(u, 0); }
    double fp(double u) const { return eval_unchecked(u, 1); }
    double fpp(double u) const { return eval_unchecked(u, 2); }

    /// Samples f'' on 10^4 + 1 points of [lo, hi].
    ConvexityResult check_convexity(double lo, double hi) const {
        if (!(lo < hi)) throw std::invalid_argument("check_convexity requires lo < hi");
        constexpr int samples = 10000;
        double min_fpp = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= samples; ++i) {
            const double u = lo + (hi - lo) * static_cast<double>(i) / samples;
            min_fpp = std::min(min_fpp, eval(u, 2));
        }
        return {min_fpp >= sigma_floor_, min_fpp};
    }

    /// Gauss-Legendre point count that integrates f' exactly along a segment.
    int default_quad_points() const {
        const int d = degree();
        return d < 0 ? 16 : std::max(4, d);
    }

private:
    struct CustomFns {
        Fn f, fp, fpp;
    };

    FluxModel(FluxKind kind, std::vector<double> coeffs, double sigma_floor)
        : kind_(kind), coeffs_(std::move(coeffs)), sigma_floor_(sigma_floor) {
        if (sigma_floor_ < 0.0) throw std::invalid_argument("sigma_floor must be non-negative");
    }

    double eval_unchecked(double u, int deriv) const {
        const double x = u - shift_;
        switch (kind_) {
            case FluxKind::Zero: return 0.0;
            case FluxKind::Linear: return deriv == 0 ? coeffs_[1] * x : (deriv == 1 ? coeffs_[1] : 0.0);
            case FluxKind::Quadratic: return deriv == 0 ? 0.5 * x * x : (deriv == 1 ? x : 1.0);
            case FluxKind::Polynomial: return horner(x, deriv);
            case FluxKind::Custom:
                return deriv == 0 ? custom_->f(x) : (deriv == 1 ? custom_->fp(x) : custom_->fpp(x));
        }
        return 0.0;
    }

    double horner(double x, int deriv) const {
        double r = 0.0;
        for (std::size_t k = coeffs_.size(); k-- > 0;) {
            if (static_cast<int>(k) < deriv) break;
            double c = coeffs_[k];
            for (int d = 0; d < deriv; ++d) c *= static_cast<double>(static_cast<int>(k) - d);
            r = r * x + c;
        }
        return r;
    }

    // f' against central differences of f, and f'' against those of f', on
    // [-validation_range, validation_range].
    void validate() const {
        constexpr int samples = 2001;
        const double range = validation_range_;
        for (int i = 0; i < samples; ++i) {
            const double u = -range + 2.0 * range * i / (samples - 1);
            const double h = 1e-4 * std::max(1.0, std::abs(u));
            const double f0 = f(u), f1 = fp(u), f2 = fpp(u);
            if (!std::isfinite(f0) || !std::isfinite(f1) || !std::isfinite(f2)) {
                throw std::invalid_argument("flux is not finite on the validation range at u = " +
                                            std::to_string(u));
            }
            const double d1 = (f(u + h) - f(u - h)) / (2.0 * h);
            const double d2 = (fp(u + h) - fp(u - h)) / (2.0 * h);
            if (std::abs(d1 - f1) > 1e-6 * std::max(1.0, std::abs(f1))) {
                throw std::invalid_argument("flux derivative f' inconsistent with f at u = " +
                                            std::to_string(u));
            }
            if (std::abs(d2 - f2) > 1e-6 * std::max(1.0, std::abs(f2))) {
                throw std::invalid_argument("flux derivative f'' inconsistent with f' at u = " +
                                            std::to_string(u));
            }
        }
    }

    FluxKind kind_;
    std::vector<double> coeffs_;
    double sigma_floor_ = 0.0;
    double shift_ = 0.0;
    double validation_range_ = 10.0;
    std::shared_ptr<const CustomFns> custom_;
};

/// a(x) = int_0^1 f'(v + tau w) dtau, so that a w = f(v + w) - f(v).
inline Field advection_coefficient(const FluxModel& fm, const Field& v, const Field& w,
                                   int quad_points) {
    v.check_same_grid(w);
    if (quad_points < 2) throw std::invalid_argument("quad_points must be at least 2");
    const std::size_t n = v.size();
    std::vector<double> a(n);
    switch (fm.kind()) {
        case FluxKind::Zero:
            break;
        case FluxKind::Linear:
            std::fill(a.begin(), a.end(), fm.fp(0.0));
            break;
        case FluxKind::Quadratic:
            for (std::size_t j = 0; j < n; ++j) a[j] = (v[j] - fm.shift()) + 0.5 * w[j];
            break;
        default: {
            const GaussRule rule = gauss_legendre_unit(quad_points);
            for (std::size_t j = 0; j < n; ++j) {
                double sum = 0.0;
                for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                    sum += rule.weights[q] * fm.fp(v[j] + rule.nodes[q] * w[j]);
                }
                a[j] = sum;
            }
        }
    }
    for (double x : a) {
        if (!std::isfinite(x)) throw NonFiniteError("advection coefficient is not finite");
    }
    return Field(v.grid(), std::move(a));
}

inline Field advection_coefficient(const FluxModel& fm, const Field& v, const Field& w) {
    return advection_coefficient(fm, v, w, fm.default_quad_points());
}

}  // namespace burgers_lab
