#include "burgers_lab/grid.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace burgers_lab;

namespace {

constexpr double pi = std::numbers::pi;

Field sin1(const PeriodicGrid& g) {
    return sample(g, [](double x) { return std::sin(2 * pi * x); });
}

}  // namespace

TEST(GridCore, MakeGridSpacing) {
    EXPECT_DOUBLE_EQ(make_grid(8).dx(), 0.125);
    EXPECT_DOUBLE_EQ(make_grid(128).node(64), 0.5);
    EXPECT_EQ(make_grid(64).n(), 64u);
}

TEST(GridCore, MakeGridRejectsOddAndSmall) {
    try {
        make_grid(7);
        FAIL() << "odd n accepted";
    } catch (const std::invalid_argument& e) {
        EXPECT_STREQ(e.what(), "odd resolution rejected");
    }
    EXPECT_THROW(make_grid(6), std::invalid_argument);
    EXPECT_THROW(make_grid(0), std::invalid_argument);
    EXPECT_THROW(make_grid(-8), std::invalid_argument);
}

TEST(GridCore, SampleExamples) {
    const auto g = make_grid(8);
    EXPECT_NEAR(sin1(g)[2], 1.0, 1e-15);
    const Field three = sample(g, [](double) { return 3.0; });
    for (double v : three.values()) EXPECT_EQ(v, 3.0);
    const Field saw = sample(g, [](double x) { return x - std::floor(x); });
    for (std::size_t j = 0; j < g.n(); ++j) EXPECT_DOUBLE_EQ(saw[j], static_cast<double>(j) / 8.0);
}

TEST(GridCore, SampleRejectsNonFinite) {
    EXPECT_THROW(sample(make_grid(8), [](double x) { return 1.0 / x; }), NonFiniteError);
    EXPECT_THROW(Field(make_grid(8), std::vector<double>(8, std::nan(""))), NonFiniteError);
    EXPECT_THROW(Field(make_grid(8), std::vector<double>(7, 0.0)), std::invalid_argument);
}

TEST(GridCore, FieldArithmeticKeepsFinite) {
    const auto g = make_grid(8);
    Field big = Field::constant(g, 1e308);
    EXPECT_THROW(big *= 10.0, NonFiniteError);
    EXPECT_THROW(sin1(g) + sin1(make_grid(16)), std::invalid_argument);
}

TEST(GridCore, DerivativeOfSine) {
    const auto g = make_grid(64);
    const Field d1 = derivative(sin1(g), 1);
    const Field d2 = derivative(sin1(g), 2);
    for (std::size_t j = 0; j < g.n(); ++j) {
        const double x = g.node(j);
        EXPECT_NEAR(d1[j], 2 * pi * std::cos(2 * pi * x), 1e-10);
        EXPECT_NEAR(d2[j], -4 * pi * pi * std::sin(2 * pi * x), 1e-9);
    }
}

TEST(GridCore, DerivativeOfConstantVanishes) {
    const auto g = make_grid(32);
    for (int k = 1; k <= 4; ++k) {
        EXPECT_EQ(norm(derivative(Field::constant(g, 2.5), k), NormKind::Linf), 0.0) << "order " << k;
    }
    EXPECT_THROW(derivative(sin1(g), 5), std::invalid_argument);
    EXPECT_THROW(derivative(sin1(g), 0), std::invalid_argument);
}

TEST(GridCore, OddDerivativeDropsNyquist) {
    const auto g = make_grid(8);
    const Field alt = sample(g, [](double x) { return std::cos(8 * pi * x); });  // pure Nyquist mode
    EXPECT_LT(norm(derivative(alt, 1), NormKind::Linf), 1e-14);
    EXPECT_LT(norm(derivative(alt, 3), NormKind::Linf), 1e-12);
    EXPECT_NEAR(derivative(alt, 2)[0], -std::pow(8 * pi, 2), 1e-9);
}

TEST(GridCore, MeanValueExamples) {
    const auto g = make_grid(16);
    EXPECT_LT(std::abs(mean_value(sin1(g))), 1e-14);
    EXPECT_DOUBLE_EQ(mean_value(Field::constant(g, 3.0)), 3.0);
    const Field s2 = sample(make_grid(8), [](double x) { return std::pow(std::sin(2 * pi * x), 2); });
    EXPECT_NEAR(mean_value(s2), 0.5, 1e-15);
}

TEST(GridCore, NormsOfSine) {
    const auto g = make_grid(128);
    EXPECT_NEAR(norm(sin1(g), NormKind::L2), std::sqrt(0.5), 1e-14);
    // Rectangle rule: (1/n) sum |sin(2 pi j / n)| = 2 / (n tan(pi / n)), which tends to 2/pi at second order.
    EXPECT_NEAR(norm(sin1(g), NormKind::L1), 2.0 / (128 * std::tan(pi / 128)), 1e-14);
    for (long n : {64L, 128L, 256L, 512L}) {
        const double err = 2.0 / pi - norm(sin1(make_grid(n)), NormKind::L1);
        EXPECT_NEAR(err * static_cast<double>(n * n), 2.0 * pi / 3.0, 0.01) << n;
    }
    EXPECT_NEAR(norm(sin1(g), NormKind::Linf), 1.0, 1e-14);
    const double k2 = 4 * pi * pi;
    EXPECT_NEAR(norm(sin1(g), NormKind::H1), std::sqrt(0.5 * (1 + k2)), 1e-11);
    EXPECT_NEAR(norm(sin1(g), NormKind::H2), std::sqrt(0.5 * (1 + k2 + k2 * k2)), 1e-9);
}

TEST(GridCore, NormsOfZeroField) {
    const Field z(make_grid(16));
    for (NormKind k : {NormKind::L1, NormKind::L2, NormKind::Linf, NormKind::H1, NormKind::H2}) {
        EXPECT_EQ(norm(z, k), 0.0) << to_string(k);
    }
}

TEST(GridCore, PosNegSplitExamples) {
    const auto g = make_grid(128);
    auto [p5, m5] = pos_neg_split(Field::constant(g, 5.0));
    EXPECT_EQ(max_value(p5), 5.0);
    EXPECT_EQ(min_value(p5), 5.0);
    EXPECT_EQ(norm(m5, NormKind::Linf), 0.0);
    auto [p3, m3] = pos_neg_split(Field::constant(g, -3.0));
    EXPECT_EQ(norm(p3, NormKind::Linf), 0.0);
    EXPECT_EQ(min_value(m3), 3.0);
    auto [ps, ms] = pos_neg_split(sin1(g));
    EXPECT_NEAR(norm(ps, NormKind::L1), 1.0 / (128 * std::tan(pi / 128)), 1e-14);
    EXPECT_NEAR(norm(ms, NormKind::L1), norm(ps, NormKind::L1), 1e-15);
}

TEST(GridCore, InterpolantSupFindsPeakBetweenNodes) {
    // sin(2 pi x + 0.3) peaks between nodes of an 8-point grid.
    const auto g = make_grid(8);
    const Field f = sample(g, [](double x) { return std::sin(2 * pi * x + 0.3); });
    EXPECT_LT(norm(f, NormKind::Linf), 0.99);
    EXPECT_NEAR(interpolant_sup_norm(f), 1.0, 1e-12);
}

// ---------------------------------------------------------------------------
// Properties

TEST(GridCoreProperty, HolderChain) {
    gen::for_all(200, 11, [](gen::Gen& g, int i) {
        const auto grid = g.grid();
        const Field f = g.coin() ? g.rough(grid, g.uniform(0.1, 10)) : g.bandlimited(grid, -1, 1.0, g.uniform(-1, 1));
        const double m = std::abs(mean_value(f)), l1 = norm(f, NormKind::L1), l2 = norm(f, NormKind::L2),
                     li = norm(f, NormKind::Linf);
        const double eps = 1e-15 * std::max(1.0, li);
        EXPECT_LE(m, l1 + eps) << gen::case_name(i);
        EXPECT_LE(l1, l2 + eps) << gen::case_name(i);
        EXPECT_LE(l2, li + eps) << gen::case_name(i);
    });
}

TEST(GridCoreProperty, RepeatedFirstDerivativeMatchesSecond) {
    gen::for_all(100, 12, [](gen::Gen& g, int i) {
        const auto grid = g.grid(4, 8);
        const Field f = g.bandlimited(grid);
        const Field a = derivative(derivative(f, 1), 1);
        const Field b = derivative(f, 2);
        const double scale = std::max(1.0, norm(b, NormKind::Linf));
        EXPECT_LE(norm(a - b, NormKind::Linf) / scale, 1e-10) << gen::case_name(i);
    });
}

TEST(GridCoreProperty, DerivativeHasZeroMean) {
    gen::for_all(100, 13, [](gen::Gen& g, int i) {
        const auto grid = g.grid();
        const Field f = g.rough(grid);
        for (int k = 1; k <= 4; ++k) {
            const Field d = derivative(f, k);
            EXPECT_LE(std::abs(mean_value(d)), 1e-12 * std::max(1.0, norm(d, NormKind::Linf)))
                << gen::case_name(i) << " order " << k;
        }
    });
}

TEST(GridCoreProperty, SplitReconstructsExactly) {
    gen::for_all(200, 14, [](gen::Gen& g, int i) {
        const auto grid = g.grid();
        const Field w = g.rough(grid, g.uniform(1e-3, 1e3));
        const auto [p, m] = pos_neg_split(w);
        EXPECT_GE(min_value(p), 0.0) << gen::case_name(i);
        EXPECT_GE(min_value(m), 0.0) << gen::case_name(i);
        for (std::size_t j = 0; j < grid.n(); ++j) {
            EXPECT_EQ(p[j] - m[j], w[j]) << gen::case_name(i);
            EXPECT_EQ(p[j] * m[j], 0.0) << gen::case_name(i);
        }
    });
}

TEST(GridCoreProperty, SobolevNormsOrdered) {
    gen::for_all(100, 15, [](gen::Gen& g, int i) {
        const auto grid = g.grid();
        const Field f = g.bandlimited(grid);
        EXPECT_LE(norm(f, NormKind::L2), norm(f, NormKind::H1) * (1 + 1e-14)) << gen::case_name(i);
        EXPECT_LE(norm(f, NormKind::H1), norm(f, NormKind::H2) * (1 + 1e-14)) << gen::case_name(i);
    });
}
