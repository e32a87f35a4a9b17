#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "nlks/grid.hpp"

namespace nlks {
namespace {

constexpr double kPi = std::numbers::pi;

Field random_field(const Grid& g, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Field f(g);
    for (double& v : f.values) v = dist(rng);
    return f;
}

TEST(Grid, SpacingFromExtentAndCells) {
    const Grid g1 = make_grid_1d(1.0, 100);
    EXPECT_DOUBLE_EQ(g1.spacing(0), 0.01);
    EXPECT_EQ(g1.size(), 100u);
    EXPECT_DOUBLE_EQ(g1.cell_measure(), 0.01);

    const Grid g2 = make_grid_2d(1.0, 2.0, 50, 100);
    EXPECT_DOUBLE_EQ(g2.spacing(0), 0.02);
    EXPECT_DOUBLE_EQ(g2.spacing(1), 0.02);
    EXPECT_DOUBLE_EQ(g2.measure(), 2.0);
    EXPECT_EQ(g2.size(), 5000u);
}

TEST(Grid, RejectsBadDimensionsExtentsAndCellCounts) {
    const std::array<double, 3> e3{1, 1, 1};
    const std::array<std::size_t, 3> n3{8, 8, 8};
    EXPECT_THROW(make_grid(3, e3, n3), InvalidArgument);
    EXPECT_THROW(make_grid_1d(0.0, 16), InvalidArgument);
    EXPECT_THROW(make_grid_1d(-1.0, 16), InvalidArgument);
    EXPECT_THROW(make_grid_1d(1.0, 3), InvalidArgument);
    EXPECT_THROW(make_grid_2d(1.0, 1.0, 8, 2), InvalidArgument);
    EXPECT_NO_THROW(make_grid_1d(1.0, 4));
}

TEST(MeanIntegral, ConstantsZeroAndLinear) {
    for (const Grid& g : {make_grid_1d(3.0, 7), make_grid_2d(0.5, 2.0, 9, 13)}) {
        EXPECT_EQ(mean_integral(Field(g, 2.0)), 2.0);
        EXPECT_EQ(mean_integral(Field(g, 0.0)), 0.0);
    }
    const Field x = sample(make_grid_1d(1.0, 256), [](double x) { return x; });
    EXPECT_NEAR(mean_integral(x), 0.5, 1e-12);
}

TEST(MeanIntegral, RejectsNonFinite) {
    Field f(make_grid_1d(1.0, 8), 1.0);
    f[3] = std::nan("");
    EXPECT_THROW(mean_integral(f), InvalidArgument);
}

TEST(LkNorm, Examples) {
    const Grid unit = make_grid_2d(1.0, 1.0, 16, 16);
    EXPECT_NEAR(lk_norm(Field(unit, 2.0), 3.0), 2.0, 1e-14);
    EXPECT_EQ(lk_norm(Field(unit, 0.0), 5.0), 0.0);
    EXPECT_EQ(lk_norm(Field(unit, 0.0), kInfNorm), 0.0);

    // Analytic: (int_0^1 x^2 dx)^(1/2) = sqrt(1/3); midpoint error is h^2/12 in the integral.
    const Field x = sample(make_grid_1d(1.0, 256), [](double x) { return x; });
    EXPECT_NEAR(lk_norm(x, 2.0), std::sqrt(1.0 / 3.0), 1e-5);
    EXPECT_NEAR(lk_norm(x, kInfNorm), 1.0 - 0.5 / 256.0, 1e-15);
    EXPECT_THROW(lk_norm(x, 0.5), InvalidArgument);
}

TEST(LkNorm, MonotoneInTheField) {
    std::mt19937_64 rng(11);
    const Grid g = make_grid_2d(1.0, 1.5, 12, 10);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Field gfield = random_field(g, rng, -3.0, 3.0);
        Field f(g);
        for (std::size_t k = 0; k < f.size(); ++k) f[k] = gfield[k] * unit(rng);
        for (double k : {1.0, 1.5, 2.0, 4.0, 9.0, kInfNorm}) {
            EXPECT_LE(lk_norm(f, k), lk_norm(gfield, k) * (1 + 1e-14)) << "k=" << k;
        }
    }
}

TEST(Laplacian, AnnihilatesConstants) {
    for (const Grid& g : {make_grid_1d(2.0, 10), make_grid_2d(1.0, 3.0, 8, 11)}) {
        const Field lap = laplacian_neumann(Field(g, 4.25));
        for (double v : lap.values) EXPECT_EQ(v, 0.0);
    }
}

TEST(Laplacian, NeumannEigenfunctionSecondOrder) {
    auto max_err = [](std::size_t n) {
        const Grid g = make_grid_1d(1.0, n);
        const Field f = sample(g, [](double x) { return std::cos(kPi * x); });
        const Field lap = laplacian_neumann(f);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            err = std::max(err, std::abs(lap[i] + kPi * kPi * std::cos(kPi * g.center(0, i))));
        }
        return err;
    };
    const double e256 = max_err(256);
    const double h = 1.0 / 256.0;
    // Truncation error of the 3-point stencil on cos(pi x) is pi^4 h^2 / 12.
    EXPECT_LE(e256, kPi * kPi * kPi * kPi * h * h / 12.0 * 1.01);
    const double ratio = max_err(64) / max_err(128);
    EXPECT_NEAR(ratio, 4.0, 0.05);
    EXPECT_NEAR(max_err(128) / e256, 4.0, 0.05);
}

TEST(Laplacian, SecondOrderIn2D) {
    auto max_err = [](std::size_t n) {
        const Grid g = make_grid_2d(1.0, 2.0, n, 2 * n);
        const Field f = sample(g, [](double x, double y) { return std::cos(kPi * x) * std::cos(kPi * y / 2.0); });
        const Field lap = laplacian_neumann(f);
        const double k2 = kPi * kPi * (1.0 + 0.25);
        double err = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) err = std::max(err, std::abs(lap[k] + k2 * f[k]));
        return err;
    };
    EXPECT_NEAR(max_err(32) / max_err(64), 4.0, 0.05);
}

TEST(Laplacian, ZeroIntegralForRandomFields) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const Grid g = trial % 2 ? make_grid_1d(1.3, 37 + trial) : make_grid_2d(1.0, 0.7, 9 + trial, 14);
        const Field f = random_field(g, rng, -5.0, 5.0);
        EXPECT_NEAR(integral(laplacian_neumann(f)), 0.0, 1e-10 * lk_norm(f, kInfNorm));
    }
}

}  // namespace
}  // namespace nlks
