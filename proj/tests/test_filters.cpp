#include "esc/filters.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace esc;

TEST(FirstOrderFilter, LowPassStepResponseExact) {
    FirstOrderFilter f(FilterKind::low_pass, 10.0, 1e-3);
    double y = 0.0;
    for (int k = 0; k < 100; ++k) y = f.step(1.0);
    EXPECT_NEAR(y, 1.0 - std::exp(-10.0 * 0.1), 1e-12);
}

TEST(FirstOrderFilter, HighPassRemovesConstant) {
    FirstOrderFilter f(FilterKind::high_pass, 1.0, 1e-3);
    double y = 0.0;
    for (int k = 0; k < 20000; ++k) y = f.step(5.0);
    EXPECT_NEAR(y, 0.0, 1e-7);
}

TEST(FirstOrderFilter, LowPlusHighIsIdentity) {
    FirstOrderFilter lp(FilterKind::low_pass, 3.0, 1e-2);
    FirstOrderFilter hp(FilterKind::high_pass, 3.0, 1e-2);
    for (int k = 0; k < 200; ++k) {
        const double u = std::sin(0.1 * k) + 0.3 * k;
        EXPECT_NEAR(lp.step(u) + hp.step(u), u, 1e-12);
    }
}

TEST(FirstOrderFilter, ZeroInputFromRestStaysZero) {
    FirstOrderFilter f(FilterKind::low_pass, 10.0, 1e-3);
    for (int k = 0; k < 10; ++k) EXPECT_EQ(filter_step(f, 0.0), 0.0);
}

TEST(FirstOrderFilter, LargeCornerTracksInput) {
    FirstOrderFilter f(FilterKind::low_pass, 1e6, 1e-3);
    EXPECT_NEAR(f.step(2.0), 2.0, 1e-12);
}

TEST(FirstOrderFilter, RejectsBadParameters) {
    EXPECT_THROW(FirstOrderFilter(FilterKind::low_pass, 0.0, 1e-3), std::invalid_argument);
    EXPECT_THROW(FirstOrderFilter(FilterKind::low_pass, -1.0, 1e-3), std::invalid_argument);
    EXPECT_THROW(FirstOrderFilter(FilterKind::low_pass, 1.0, 0.0), std::invalid_argument);
}

TEST(Estimators, GradientOfPureCarrier) {
    // y = y* + g a sin wt: period-averaged M y = g Re H_washout(jw)
    const DitherParams p{0.2, 10.0, 1.0};
    FirstOrderFilter wo(FilterKind::high_pass, 1.0, 1e-3);
    const int period = static_cast<int>(std::lround(2 * std::numbers::pi / 10.0 / 1e-3));
    const int n = 40000;
    double sum = 0.0;
    int count = 0;
    for (int k = 0; k < n; ++k) {
        const double t = k * 1e-3;
        const double g = estimate_gradient(5.0 + 0.7 * 0.2 * std::sin(10.0 * t), t, p, wo);
        if (k >= n - 10 * period) {
            sum += g;
            ++count;
        }
    }
    EXPECT_NEAR(sum / count, 0.7 * 100.0 / 101.0, 2e-3);
}

TEST(Estimators, HessianOfQuadraticMap) {
    const DitherParams p{0.2, 10.0, 1.0};
    GradientHessianEstimator est(p, 1e-3, 1.0, 0.2);
    EstimatorOutputs o;
    for (int k = 0; k < 60000; ++k) {
        const double t = k * 1e-3;
        const double e = 0.2 * std::sin(10.0 * t);
        o = est.update(5.0 - e * e, t);
    }
    EXPECT_NEAR(o.H_hat, -2.0, 0.02);
}

TEST(Estimators, RequireExcitation) {
    const DitherParams p{0.0, 10.0, 1.0};
    FirstOrderFilter f(FilterKind::high_pass, 1.0, 1e-3);
    EXPECT_THROW(estimate_gradient(1.0, 0.0, p, f), std::invalid_argument);
    EXPECT_THROW(estimate_hessian(1.0, 0.0, p, f), std::invalid_argument);
    EXPECT_THROW(GradientHessianEstimator(p, 1e-3, 1.0, 1.0), std::invalid_argument);
}
