#include "esc/controller.hpp"
#include "esc/quadrature.hpp"
#include "oracle_values.hpp"

#include <gtest/gtest.h>

#include <complex>
#include <numbers>
#include <vector>

using namespace esc;

namespace {
constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

// gamma(x) = Kbar cosh(sqrt(A_cl) x) / cosh(sqrt(A_cl) L) with a complex root,
// valid for either sign of A_cl
double gamma_complex(double K_bar, double L, double x) {
    const std::complex<double> r = std::sqrt(std::complex<double>(K_bar * L, 0.0));
    return (K_bar * std::cosh(r * x) / std::cosh(r * L)).real();
}
}  // namespace

TEST(CheckGain, RejectsForbiddenValues) {
    for (int kappa : {0, 1, 2, 7}) {
        const auto c = check_gain(forbidden_gain(kappa, 1.0), 1.0);
        EXPECT_FALSE(c.admissible) << kappa;
        ASSERT_TRUE(c.kappa.has_value());
        EXPECT_EQ(*c.kappa, kappa);
        EXPECT_NE(c.reason.find("forbidden"), std::string::npos);
    }
    EXPECT_FALSE(check_gain(-kPi2 / 4, 1.0).admissible);
    EXPECT_FALSE(check_gain(-9 * kPi2 / 4, 1.0).admissible);
}

TEST(CheckGain, AcceptsPaperGain) {
    const auto c = check_gain(-0.4, 1.0);
    EXPECT_TRUE(c.admissible);
    EXPECT_FALSE(c.near_forbidden);
}

TEST(CheckGain, RejectsNonNegativeAndNonFinite) {
    EXPECT_FALSE(check_gain(0.0, 1.0).admissible);
    EXPECT_FALSE(check_gain(0.4, 1.0).admissible);
    EXPECT_FALSE(check_gain(NAN, 1.0).admissible);
    EXPECT_THROW(check_gain(-0.4, 0.0), std::invalid_argument);
}

TEST(CheckGain, NearForbiddenBandFlagged) {
    const double tol = default_gain_tolerance(1.0);
    const auto c = check_gain(-kPi2 / 4 + 5 * tol, 1.0);
    EXPECT_TRUE(c.admissible);
    EXPECT_TRUE(c.near_forbidden);
    EXPECT_FALSE(check_gain(-kPi2 / 4 + 0.5 * tol, 1.0).admissible);
}

TEST(CheckGain, ScalesWithLength) {
    EXPECT_FALSE(check_gain(-kPi2 / (4 * 8.0), 2.0).admissible);
    EXPECT_TRUE(check_gain(-kPi2 / 4, 2.0).admissible);
}

TEST(Kernel, MatchesOracle) {
    const BacksteppingKernel k(-0.4, 1.0);
    EXPECT_NEAR(gamma_kernel(k, 0.5), oracle::kGammaHalf, 1e-15);
    EXPECT_NEAR(gamma_kernel(k, 0.0), oracle::kGammaZero, 1e-15);
    EXPECT_EQ(gamma_kernel(k, 1.0), -0.4);
    EXPECT_NEAR(k.moment_g_gamma(), oracle::kMomentGGamma, 1e-15);
}

TEST(Kernel, AgreesWithComplexEvaluation) {
    for (double K_bar : {-0.4, -1.7, -5.0, 0.4, 3.0}) {
        const BacksteppingKernel k(K_bar, 1.0);
        for (double x : {0.0, 0.25, 0.6, 1.0}) EXPECT_NEAR(k.gamma(x), gamma_complex(K_bar, 1.0, x), 1e-13) << K_bar;
    }
}

TEST(Kernel, MomentMatchesQuadrature) {
    for (double K_bar : {-0.4, -2.0, 1e-7, -1e-7, 0.8}) {
        const BacksteppingKernel k(K_bar, 1.0);
        const double q = integrate_gauss_legendre([&](double x) { return k.g(x) * k.gamma(x); }, 0.0, 1.0, 64);
        EXPECT_NEAR(k.moment_g_gamma(), q, 1e-14 + 1e-12 * std::abs(q)) << K_bar;
    }
}

TEST(Kernel, SatisfiesOde) {
    const BacksteppingKernel k(-0.4, 1.0);
    const double h = 1e-4;
    for (double x : {0.2, 0.5, 0.8}) {
        const double g2 = (k.gamma(x + h) - 2 * k.gamma(x) + k.gamma(x - h)) / (h * h);
        EXPECT_NEAR(g2, k.A_cl() * k.gamma(x), 1e-6);
    }
    EXPECT_NEAR((k.gamma(h) - k.gamma(0.0)) / h, 0.0, 1e-4);
}

TEST(Kernel, RejectsSingularGain) {
    EXPECT_THROW(BacksteppingKernel(-kPi2 / 4, 1.0), std::invalid_argument);
    const BacksteppingKernel k(-0.4, 1.0);
    EXPECT_THROW(gamma_kernel(k, 1.5), std::invalid_argument);
}

TEST(IdealControl, Values) {
    const BacksteppingKernel k(-0.4, 1.0);
    const std::vector<double> zero(51, 0.0);
    EXPECT_NEAR(ideal_control(k, 1.0, zero), -0.4, 1e-15);
    EXPECT_EQ(ideal_control(k, 0.0, zero), 0.0);
    // int (L^2 - x^2)/2 dx = 1/3
    const std::vector<double> ones(201, 1.0);
    EXPECT_NEAR(ideal_control(k, 0.0, ones), -0.4 / 3.0, 1e-5);
}

TEST(AverageControl, ReducesToIdealLawWithExactEstimates) {
    const BacksteppingKernel k(-0.4, 1.0);
    std::vector<double> u(101);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::sin(3.0 * i / 100.0);
    const double vartheta = 0.3;
    const double H = -2.0, K = 0.2;
    EXPECT_NEAR(average_control(k, H * vartheta, H, u, K), ideal_control(k, vartheta, u), 1e-15);
}

TEST(RealtimeControl, BracketAndFilter) {
    const DitherParams p{0.2, 10.0, 1.0};
    ControllerState s(GainConfig{}, 1.0, 1e-3, 0.5);
    EXPECT_NEAR(realtime_bracket(s, 0.1, -2.0, 0.5, 0.0, p), 0.2 * 0.1, 1e-15);
    ControllerState s2(GainConfig{}, 1.0, 1e-3, 0.0);
    double U = 0.0;
    for (int i = 0; i < 2000; ++i) U = realtime_control(s2, 1.0, 0.0, 0.0, 0.0, p);
    EXPECT_NEAR(U, 0.2, 1e-8);
}

TEST(RealtimeControl, IntegratorAndZeroGain) {
    GainConfig g;
    g.K = 0.0;
    ControllerState s(g, 1.0, 1e-3, 1.25);
    const DitherParams p{0.2, 10.0, 1.0};
    for (int i = 0; i < 100; ++i) integrate_theta_hat(s, realtime_control(s, 3.0, -2.0, 0.1, i * 1e-3, p), 1e-3);
    EXPECT_EQ(s.theta_hat, 1.25);
    EXPECT_THROW(integrate_theta_hat(s, 1.0, 0.0), std::invalid_argument);
}
