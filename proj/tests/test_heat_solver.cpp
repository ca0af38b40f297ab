#include "esc/dither.hpp"
#include "esc/heat_solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace esc;

TEST(HeatSolver, ConstantFieldWithMatchingBoundaryIsSteady) {
    for (auto scheme : {Scheme::crank_nicolson, Scheme::implicit_euler}) {
        auto f = ActuatorField::constant(Grid::uniform(1.0, 21), 2.5);
        for (int k = 0; k < 50; ++k) step(f, 2.5, {1e-2, scheme});
        for (double v : f.alpha) EXPECT_NEAR(v, 2.5, 1e-13);
        EXPECT_NEAR(f.t, 0.5, 1e-12);
    }
}

TEST(HeatSolver, SteadyStateIsBoundaryValue) {
    auto f = ActuatorField::constant(Grid::uniform(1.0, 41), 0.0);
    for (int k = 0; k < 2000; ++k) step(f, 1.0, {1e-2, Scheme::implicit_euler});
    EXPECT_NEAR(spatial_integral(f), 1.0, 1e-8);
}

TEST(HeatSolver, CosineModeDecaysAtExactRate) {
    // cos(pi x / 2) e^{-pi^2 t / 4} satisfies both boundary conditions on [0, 1]
    const double k = std::numbers::pi / 2;
    auto f = ActuatorField::sampled(Grid::uniform(1.0, 201), [&](double x) { return std::cos(k * x); });
    const double dt = 1e-3;
    for (int s = 0; s < 500; ++s) step(f, 0.0, {dt, Scheme::crank_nicolson});
    const double decay = std::exp(-k * k * 0.5);
    for (std::size_t i = 0; i < f.grid.n; i += 20) EXPECT_NEAR(f.alpha[i], std::cos(k * f.grid.x(i)) * decay, 2e-5);
}

TEST(HeatSolver, ExplicitStabilityLimitEnforced) {
    auto f = ActuatorField::constant(Grid::uniform(1.0, 101), 0.0);
    EXPECT_THROW(step(f, 0.0, {1e-3, Scheme::explicit_euler}), std::invalid_argument);
    EXPECT_NO_THROW(step(f, 0.0, {4e-5, Scheme::explicit_euler}));
}

TEST(HeatSolver, RejectsInvalidInputs) {
    auto f = ActuatorField::constant(Grid::uniform(1.0, 11), 0.0);
    EXPECT_THROW(step(f, 0.0, {0.0, Scheme::crank_nicolson}), std::invalid_argument);
    EXPECT_THROW(step(f, NAN, {1e-3, Scheme::crank_nicolson}), std::invalid_argument);
    EXPECT_THROW(Grid::uniform(1.0, 2), std::invalid_argument);
    EXPECT_THROW(Grid::uniform(0.0, 11), std::invalid_argument);
    EXPECT_THROW(parse_scheme("rk4"), std::invalid_argument);
}

TEST(HeatSolver, NonFiniteStateReportsNode) {
    auto f = ActuatorField::constant(Grid::uniform(1.0, 11), 0.0);
    f.alpha[4] = NAN;
    try {
        step(f, 0.0, {1e-3, Scheme::crank_nicolson});
        FAIL() << "expected NonFiniteStateError";
    } catch (const NonFiniteStateError& e) {
        EXPECT_EQ(e.node(), 4u);
    }
}

TEST(HeatSolver, SpatialIntegralOfConstant) {
    const auto f = ActuatorField::constant(Grid::uniform(2.0, 11), 3.0);
    EXPECT_NEAR(spatial_integral(f), 6.0, 1e-14);
    EXPECT_NEAR(spatial_integral(f, QuadratureRule::simpson), 6.0, 1e-14);
}

TEST(HeatSolver, LastNodeHoldsAppliedBoundary) {
    auto f = ActuatorField::constant(Grid::uniform(1.0, 11), 0.0);
    step(f, 0.7, {1e-3, Scheme::crank_nicolson});
    EXPECT_EQ(f.boundary(), 0.7);
    EXPECT_EQ(f.grid.x(10), 1.0);
}

TEST(Convergence, CrankNicolsonSecondOrderInSpace) {
    const auto d = design_dither({0.2, 10.0, 1.0});
    const std::vector<Refinement> levels{{26, 1e-4}, {51, 1e-4}, {101, 1e-4}};
    const auto study = convergence_order([&](double x, double t) { return beta_field(d, x, t); }, levels, 1.0, 0.5);
    EXPECT_FALSE(study.inconclusive);
    EXPECT_NEAR(study.order, 2.0, 0.2);
}

TEST(Convergence, ImplicitEulerFirstOrderInTime) {
    const auto d = design_dither({0.2, 10.0, 1.0});
    const std::vector<Refinement> levels{{401, 4e-3}, {401, 2e-3}, {401, 1e-3}};
    const auto study = convergence_order([&](double x, double t) { return beta_field(d, x, t); }, levels, 1.0, 0.5,
                                         Scheme::implicit_euler, ConvergenceAxis::time);
    EXPECT_NEAR(study.order, 1.0, 0.15);
}

TEST(Convergence, ExactlyRepresentedSolutionIsInconclusive) {
    const std::vector<Refinement> levels{{11, 1e-2}, {21, 1e-2}, {41, 1e-2}};
    const auto study = convergence_order([](double, double) { return 1.0; }, levels, 1.0, 0.1);
    EXPECT_TRUE(study.inconclusive);
}

TEST(Convergence, NeedsThreeLevels) {
    const std::vector<Refinement> levels{{11, 1e-2}, {21, 1e-2}};
    EXPECT_THROW(convergence_order([](double, double) { return 1.0; }, levels, 1.0, 0.1), std::invalid_argument);
}
