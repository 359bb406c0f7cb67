#pragma once

// Generators for randomized corpora. All draws go through std::mt19937_64 so
// a seed fixes the output on a given standard library.

#include "burgers_lab/grid.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace burgers_lab {

/// sum_{k=1..modes} r_k cos(2 pi k x + phi_k), r_k ~ U(-1, 1) k^-decay,
/// rescaled so the L1 norm equals l1_target (skipped if l1_target <= 0).
inline Field random_bandlimited(const PeriodicGrid& grid, int modes, double decay, double l1_target,
                                std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::vector<double> r(static_cast<std::size_t>(modes)), phi(r.size());
    for (std::size_t k = 0; k < r.size(); ++k) {
        r[k] = amp(rng) * std::pow(static_cast<double>(k + 1), -decay);
        phi[k] = phase(rng);
    }
    std::vector<double> values(grid.n(), 0.0);
    for (std::size_t j = 0; j < grid.n(); ++j) {
        const double x = grid.node(j);
        for (std::size_t k = 0; k < r.size(); ++k) {
            values[j] += r[k] * std::cos(2.0 * std::numbers::pi * static_cast<double>(k + 1) * x + phi[k]);
        }
    }
    Field f(grid, std::move(values));
    if (l1_target > 0.0) {
        const double l1 = norm(f, NormKind::L1);
        if (l1 > 0.0) f *= l1_target / l1;
    }
    return f;
}

/// Nonnegative, not identically zero: max(0, g + s) for a band-limited g and
/// a random level s, so the support is sometimes partial.
inline Field random_nonnegative(const PeriodicGrid& grid, int modes, std::mt19937_64& rng) {
    Field g = random_bandlimited(grid, modes, 1.0, 0.0, rng);
    const double top = max_value(g), bottom = min_value(g);
    std::uniform_real_distribution<double> level(0.0, 1.0);
    // Level between cutting most of g and lifting all of it.
    const double s = -top + level(rng) * (top - bottom) * 1.2 + 1e-3 * (top - bottom);
    std::vector<double> values(grid.n());
    for (std::size_t j = 0; j < grid.n(); ++j) values[j] = std::max(0.0, g[j] + s);
    Field out(grid, std::move(values));
    if (max_value(out) <= 0.0) out = Field::constant(grid, 1.0);
    return out;
}

}  // namespace burgers_lab
