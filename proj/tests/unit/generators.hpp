#pragma once

// Small hand-rolled generators for property tests. Each property runs a
// fixed number of cases from a fixed seed; a failure message names the case.

#include "burgers_lab/grid.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace gen {

using burgers_lab::Field;
using burgers_lab::PeriodicGrid;

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }
    std::mt19937_64& rng() { return rng_; }

    /// Even grid size, power of two from 8 to 256.
    PeriodicGrid grid(int min_log2 = 3, int max_log2 = 8) {
        return PeriodicGrid::make(1L << integer(min_log2, max_log2));
    }

    /// Trigonometric polynomial with modes strictly below n/3, so products
    /// and derivatives stay resolved.
    Field bandlimited(const PeriodicGrid& g, int max_mode = -1, double amplitude = 1.0, double mean = 0.0) {
        const int cap = static_cast<int>(g.n() / 3) - 1;
        const int top = max_mode < 0 ? std::max(1, std::min(cap, 6)) : std::min(cap, max_mode);
        std::vector<double> a(static_cast<std::size_t>(top)), b(a.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            a[k] = uniform(-amplitude, amplitude) / static_cast<double>(k + 1);
            b[k] = uniform(-amplitude, amplitude) / static_cast<double>(k + 1);
        }
        std::vector<double> v(g.n(), mean);
        for (std::size_t j = 0; j < g.n(); ++j) {
            const double x = g.node(j);
            for (std::size_t k = 0; k < a.size(); ++k) {
                const double arg = 2.0 * std::numbers::pi * static_cast<double>(k + 1) * x;
                v[j] += a[k] * std::cos(arg) + b[k] * std::sin(arg);
            }
        }
        return Field(g, std::move(v));
    }

    /// Arbitrary nodal values, not band-limited.
    Field rough(const PeriodicGrid& g, double scale = 1.0) {
        std::vector<double> v(g.n());
        for (auto& x : v) x = uniform(-scale, scale);
        return Field(g, std::move(v));
    }

private:
    std::mt19937_64 rng_;
};

template <class Fn>
void for_all(int cases, std::uint64_t seed, Fn&& fn) {
    for (int i = 0; i < cases; ++i) {
        Gen g(seed * 1000003ULL + static_cast<std::uint64_t>(i));
        fn(g, i);
    }
}

inline std::string case_name(int i) { return "property case " + std::to_string(i); }

}  // namespace gen
