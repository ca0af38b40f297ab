#include "esc/analysis.hpp"
#include "oracle_values.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

using namespace esc;

namespace {
std::vector<double> smooth_profile(std::size_t n) {
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(n - 1);
        u[i] = 0.3 * std::cos(2.0 * x) + 0.1 * x * x * x - 0.05;
    }
    return u;
}
}  // namespace

TEST(Transform, ZeroProfile) {
    const BacksteppingKernel k(-0.4, 1.0);
    const std::vector<double> u(51, 0.0);
    const auto ts = to_target(k, 1.0, u);
    EXPECT_EQ(ts.Z, 1.0);
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_EQ(ts.w[i], -k.gamma(k.node(i, u.size())));
}

TEST(Transform, InverseOfZero) {
    const BacksteppingKernel k(-0.4, 1.0);
    const auto ps = from_target(k, {0.0, std::vector<double>(51, 0.0)});
    EXPECT_EQ(ps.vartheta, 0.0);
    for (double v : ps.u) EXPECT_EQ(v, 0.0);
}

TEST(Transform, InverseWithUnitZMatchesOracle) {
    const BacksteppingKernel k(-0.4, 1.0);
    const auto ps = from_target(k, {1.0, std::vector<double>(101, 0.0)});
    EXPECT_NEAR(ps.vartheta, oracle::kVarthetaZ1, 1e-14);
    // quadrature moment agrees to O(dx^2)
    const auto pq = from_target(k, {1.0, std::vector<double>(101, 0.0)}, KernelMoment::quadrature);
    EXPECT_NEAR(pq.vartheta, oracle::kVarthetaZ1, 1e-4);
}

TEST(Transform, RoundTripExactWithDiscreteMoment) {
    const BacksteppingKernel k(-0.4, 1.0);
    const auto u = smooth_profile(101);
    const auto ts = to_target(k, 0.7, u);
    const auto ps = from_target(k, ts, KernelMoment::quadrature);
    EXPECT_NEAR(ps.vartheta, 0.7, 1e-10);
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(ps.u[i], u[i], 1e-12);
    // the other direction
    const auto back = to_target(k, ps.vartheta, ps.u);
    EXPECT_NEAR(back.Z, ts.Z, 1e-10);
}

TEST(Transform, PureKernelProfileHasZeroW) {
    const BacksteppingKernel k(-0.4, 1.0);
    const double Z0 = 0.8;
    const auto ps = from_target(k, {Z0, std::vector<double>(201, 0.0)}, KernelMoment::quadrature);
    const auto ts = to_target(k, ps.vartheta, ps.u);
    for (double v : ts.w) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Transform, RoundTripSecondOrderWithAnalyticMoment) {
    const BacksteppingKernel k(-0.4, 1.0);
    std::vector<double> err;
    for (std::size_t n : {26u, 51u, 101u}) {
        const auto u = smooth_profile(n);
        const auto ps = from_target(k, to_target(k, 0.7, u));
        err.push_back(std::abs(ps.vartheta - 0.7));
    }
    EXPECT_NEAR(std::log2(err[0] / err[1]), 2.0, 0.1);
    EXPECT_NEAR(std::log2(err[1] / err[2]), 2.0, 0.1);
}

TEST(FitDecay, ExactExponential) {
    std::vector<double> t, om;
    for (int i = 0; i <= 200; ++i) {
        t.push_back(0.05 * i);
        om.push_back(3.0 * std::exp(-0.5 * t.back()));
    }
    const auto f = fit_decay(t, om);
    EXPECT_NEAR(f.nu_hat, 0.5, 1e-6);
    EXPECT_NEAR(f.eta_hat * om.front(), 3.0, 1e-6);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
    EXPECT_FALSE(f.degenerate);
}

TEST(FitDecay, ExcludesNonPositiveAndFlagsFloor) {
    std::vector<double> t{0, 1, 2, 3, 4, 5}, om{1, 0.5, 0.0, 1e-300, 1e-301, 1e-302};
    const auto f = fit_decay(t, om, 1.0);
    EXPECT_EQ(f.excluded, 1u);
    EXPECT_TRUE(f.degenerate);
    EXPECT_FALSE(f.note.empty());
}

TEST(FitDecay, RejectsBadInput) {
    std::vector<double> t{0, 1}, om{1};
    EXPECT_THROW(fit_decay(t, om), std::invalid_argument);
    std::vector<double> om2{1, 1};
    EXPECT_THROW(fit_decay(t, om2, 0.0), std::invalid_argument);
}

TEST(TargetResiduals, PaperGains) {
    auto cfg = ScenarioConfig::paper();
    cfg.T_final = 2.0;
    cfg.record_every = 1;
    const std::vector<double> u(cfg.grid.n, 0.0);
    const auto rec = run_average_system(cfg, 1.0, u, {true, true});
    const auto r = target_residuals(rec, BacksteppingKernel(-0.4, 1.0));
    EXPECT_FALSE(r.inconclusive);
    EXPECT_LT(r.max_wL, 1e-12);
    EXPECT_LT(r.max_Zdot_residual, 1e-7);
    EXPECT_TRUE(r.warnings.empty());
}

TEST(TargetResiduals, NearForbiddenGainWarns) {
    auto cfg = ScenarioConfig::paper();
    const double K_bar = forbidden_gain(0, 1.0) + 5.0 * default_gain_tolerance(1.0);
    cfg.gains.K = K_bar / cfg.map.H;
    cfg.T_final = 0.5;
    cfg.record_every = 5;
    const std::vector<double> u(cfg.grid.n, 0.0);
    const auto rec = run_average_system(cfg, 1.0, u, {true, true});
    EXPECT_FALSE(rec.warnings.empty());
    const auto r = target_residuals(rec, BacksteppingKernel(K_bar, 1.0));
    EXPECT_GE(r.warnings.size(), 1u);
}

TEST(TargetResiduals, TooFewProfilesInconclusive) {
    AverageRecord rec;
    const auto r = target_residuals(rec, BacksteppingKernel(-0.4, 1.0));
    EXPECT_TRUE(r.inconclusive);
}

TEST(AverageEstimates, PeriodAveragesGiveGradientAndHessian) {
    const StaticMap m;
    const DitherParams p{0.2, 10.0, 1.0};
    for (double vt : {0.0, 0.3, -1.2}) {
        const auto e = period_average_estimates(m, p, vt);
        EXPECT_NEAR(e.G_av, m.H * vt, 1e-12);
        EXPECT_NEAR(e.H_av, m.H, 1e-12);
    }
}

TEST(ResidualScaling, SyntheticPowerLaws) {
    std::vector<ScalingRun> runs;
    for (double a : {0.2, 0.1, 0.05}) runs.push_back({a, 10.0, 0.5 * a * a, 0.64 * a, false});
    const auto rep = residual_scaling(runs);
    EXPECT_FALSE(rep.inconclusive);
    EXPECT_NEAR(rep.y_exponent, 2.0, 1e-12);
    EXPECT_NEAR(rep.Theta_exponent, 1.0, 1e-12);
    EXPECT_FALSE(rep.omega_monotone.has_value());
}

TEST(ResidualScaling, SingleValueInconclusive) {
    std::vector<ScalingRun> runs{{0.2, 10.0, 0.02, 0.12, false}};
    EXPECT_TRUE(residual_scaling(runs).inconclusive);
}

TEST(ResidualScaling, FloorAndFailures) {
    std::vector<ScalingRun> runs{{0.2, 10.0, 1e-14, 0.1, false}, {0.1, 10.0, 0.005, 0.05, false},
                                 {0.05, 10.0, 0.001, 0.02, false}, {0.4, 10.0, 0, 0, true}};
    const auto rep = residual_scaling(runs);
    EXPECT_TRUE(rep.inconclusive);
    EXPECT_GE(rep.notes.size(), 2u);
}

TEST(ResidualScaling, OmegaMonotonicity) {
    std::vector<ScalingRun> runs{{0.2, 10.0, 0.021, 0.13, false}, {0.2, 20.0, 0.020, 0.127, false}};
    EXPECT_TRUE(residual_scaling(runs).omega_monotone.value());
    runs.push_back({0.1, 10.0, 0.005, 0.06, false});
    runs.push_back({0.1, 20.0, 0.008, 0.06, false});
    EXPECT_FALSE(residual_scaling(runs).omega_monotone.value());
}

TEST(Report, KeyValueLines) {
    Report r;
    r.add("nu_hat", 0.8);
    r.add("ok", true);
    r.add("n", std::size_t{3});
    std::ostringstream os;
    r.write(os);
    EXPECT_EQ(os.str(), "nu_hat: 0.8\nok: true\nn: 3\n");
}
