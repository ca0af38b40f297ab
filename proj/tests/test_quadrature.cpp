#include "esc/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace esc;

TEST(GaussLegendre, WeightsSumToTwo) {
    for (std::size_t n : {1u, 2u, 5u, 16u, 64u}) {
        const auto r = gauss_legendre_rule(n);
        double s = 0.0;
        for (double w : r.weights) s += w;
        EXPECT_NEAR(s, 2.0, 1e-14) << n;
    }
}

TEST(GaussLegendre, ExactForPolynomialsUpToDegree2nMinus1) {
    const auto r = gauss_legendre_rule(5);
    for (int deg = 0; deg <= 9; ++deg) {
        const double got = integrate_gauss_legendre([&](double x) { return std::pow(x, deg); }, 0.0, 1.0, r);
        EXPECT_NEAR(got, 1.0 / (deg + 1), 1e-14) << deg;
    }
}

TEST(GaussLegendre, NodesSymmetric) {
    const auto r = gauss_legendre_rule(7);
    for (std::size_t i = 0; i < 7; ++i) EXPECT_NEAR(r.nodes[i], -r.nodes[6 - i], 1e-15);
    EXPECT_EQ(r.nodes[3], 0.0);
}

TEST(GaussLegendre, SmoothIntegrand) {
    const double got = integrate_gauss_legendre([](double x) { return std::exp(x) * std::sin(3 * x); }, 0.0, 2.0, 64);
    // int e^x sin 3x = e^x (sin 3x - 3 cos 3x) / 10
    const double exact = (std::exp(2.0) * (std::sin(6.0) - 3 * std::cos(6.0)) + 3.0) / 10.0;
    EXPECT_NEAR(got, exact, 1e-13);
}

TEST(GaussLegendre, RejectsZeroNodes) { EXPECT_THROW(gauss_legendre_rule(0), std::invalid_argument); }

TEST(GridQuadrature, TrapezoidExactForLinear) {
    const std::size_t n = 11;
    const double dx = 0.1;
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = 3.0 + 2.0 * i * dx;
    EXPECT_NEAR(integrate_grid(f, dx), 4.0, 1e-14);
}

TEST(GridQuadrature, SimpsonExactForCubicOddN) {
    const std::size_t n = 11;
    const double dx = 0.1;
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = i * dx;
        f[i] = x * x * x;
    }
    EXPECT_NEAR(integrate_grid(f, dx, QuadratureRule::simpson), 0.25, 1e-14);
}

TEST(GridQuadrature, SimpsonFallsBackForEvenN) {
    const auto ws = quadrature_weights(10, 0.1, QuadratureRule::simpson);
    const auto wt = quadrature_weights(10, 0.1, QuadratureRule::trapezoid);
    EXPECT_EQ(ws, wt);
}

TEST(GridQuadrature, TrapezoidSecondOrder) {
    auto err = [](std::size_t n) {
        const double dx = 1.0 / (n - 1);
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = std::cos(i * dx);
        return std::abs(integrate_grid(f, dx) - std::sin(1.0));
    };
    EXPECT_NEAR(std::log2(err(51) / err(101)), 2.0, 0.05);
}
