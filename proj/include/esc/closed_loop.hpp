#pragma once

// =============================================================================
// Closed-loop scenarios
// =============================================================================
// run_esc            full loop: PDE actuator, quadratic map, washout +
//                    demodulation estimates, filtered compensation law.
// run_average_system average error cascade under the average control law.
// run_standard_esc   classic gradient ESC without actuator dynamics.
// =============================================================================

#include "esc/controller.hpp"
#include "esc/dither.hpp"
#include "esc/filters.hpp"
#include "esc/heat_solver.hpp"
#include "esc/quadrature.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace esc {

struct StaticMap {
    double y_star = 5.0;
    double theta_star = 2.0;
    double H = -2.0;

    void validate() const {
        if (!std::isfinite(y_star) || !std::isfinite(theta_star) || !std::isfinite(H)) {
            throw std::invalid_argument("static map parameters must be finite");
        }
        if (!(H < 0.0)) throw std::invalid_argument("static map Hessian H must be negative (maximisation)");
    }
};

/// y = y* + (H/2)(Theta - Theta*)^2
inline double evaluate_map(const StaticMap& map, double Theta) {
    const double e = Theta - map.theta_star;
    return map.y_star + 0.5 * map.H * e * e;
}

enum class ScenarioKind { esc, average, standard };

inline const char* to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::esc: return "esc";
        case ScenarioKind::average: return "average";
        case ScenarioKind::standard: return "standard";
    }
    return "?";
}

inline ScenarioKind parse_scenario_kind(const std::string& s) {
    if (s == "esc") return ScenarioKind::esc;
    if (s == "average") return ScenarioKind::average;
    if (s == "standard") return ScenarioKind::standard;
    throw std::invalid_argument("unknown scenario kind '" + s + "' (expected esc|average|standard)");
}

struct EstimatorConfig {
    double washout_corner = 1.0;   // rad/s, high-pass on y
    double hessian_corner = 1.0;   // rad/s, low-pass on N(t) y
    HessianInput hessian_input = HessianInput::washed;
};

struct ScenarioConfig {
    std::string name = "paper_baseline";
    ScenarioKind kind = ScenarioKind::esc;
    StaticMap map;
    DitherParams dither;
    DitherFormula dither_formula = DitherFormula::consistent;
    GainConfig gains;
    EstimatorConfig estimators;
    SolverConfig solver;
    Grid grid;
    double diffusion = 1.0;
    double T_final = 100.0;
    double initial_theta_hat = 0.0;
    std::vector<double> initial_alpha;   // empty: alpha(x, 0) = 0
    std::size_t record_every = 10;
    std::size_t snapshot_every = 0;      // field snapshots, 0 disables
    // average-system initial data
    double initial_vartheta = 1.0;
    double initial_u = 0.0;
    // standard ESC baseline
    bool standard_washout = true;
    // average system: run even when Kbar fails the admissibility gate (instability probes)
    bool allow_inadmissible_gain = false;

    /// Numerical-experiment configuration: L = 1, eps = 1, K = 0.2, c = 10,
    /// a = 0.2, omega = 10, H = -2, Theta* = 2, y* = 5.
    static ScenarioConfig paper() {
        ScenarioConfig c;
        c.gains.K_bar = c.gains.K * c.map.H;
        return c;
    }

    [[nodiscard]] std::size_t steps() const {
        return static_cast<std::size_t>(std::llround(T_final / solver.dt));
    }
    [[nodiscard]] double nominal_K_bar() const { return gains.K * map.H; }

    void validate() const {
        map.validate();
        dither.validate();
        grid.validate();
        validate_solver(solver, grid, diffusion);
        if (std::abs(dither.length - grid.length) > 1e-12 * grid.length) {
            throw std::invalid_argument("dither length and grid length differ");
        }
        if (!(T_final > 0.0) || !std::isfinite(T_final)) throw std::invalid_argument("T_final must be > 0");
        if (record_every == 0) throw std::invalid_argument("record_every must be >= 1");
        if (!initial_alpha.empty() && initial_alpha.size() != grid.n) {
            throw std::invalid_argument("initial_alpha has " + std::to_string(initial_alpha.size()) +
                                        " entries, grid has " + std::to_string(grid.n));
        }
        if (!(gains.c > 0.0)) throw std::invalid_argument("controller corner c must be > 0");
        if (!std::isfinite(gains.K)) throw std::invalid_argument("adaptation gain K must be finite");
    }

    /// Extra checks for the PDE loop: eps = 1, nonzero excitation, admissible Kbar.
    void validate_esc() const {
        validate();
        if (gains.K < 0.0) throw std::invalid_argument("adaptation gain K must be >= 0");
        if (diffusion != 1.0) {
            throw std::invalid_argument("ESC scenarios require diffusion eps = 1 (the dither design assumes it), got " +
                                        std::to_string(diffusion));
        }
        if (dither.amplitude < kMinDitherAmplitude) {
            throw std::invalid_argument("dither amplitude a = " + std::to_string(dither.amplitude) +
                                        " gives no excitation; ESC cannot estimate the gradient");
        }
        if (gains.K > 0.0) {
            const auto check = check_gain(nominal_K_bar(), grid.length);
            if (!check.admissible) throw std::invalid_argument("inadmissible gain: " + check.reason);
        }
    }
};

struct TrajectorySample {
    double t = 0.0;
    double theta = 0.0;     // boundary input theta(t)
    double Theta = 0.0;     // int alpha
    double y = 0.0;
    double U = 0.0;
    double G_hat = 0.0;
    double H_hat = 0.0;
    double S = 0.0;
    double vartheta = 0.0;  // Theta - a sin(wt) - Theta*
};

struct FieldSnapshot {
    double t = 0.0;
    std::vector<double> alpha;
};

struct TrajectoryRecord {
    std::vector<TrajectorySample> samples;
    std::vector<FieldSnapshot> snapshots;
    Grid grid;
    std::vector<std::string> warnings;
};

class SimulationError : public std::runtime_error {
public:
    SimulationError(const std::string& what, std::size_t step, TrajectorySample last)
        : std::runtime_error(what + " at step " + std::to_string(step)), step_(step), last_(last) {}
    [[nodiscard]] std::size_t step() const noexcept { return step_; }
    [[nodiscard]] const TrajectorySample& last_record() const noexcept { return last_; }

private:
    std::size_t step_;
    TrajectorySample last_;
};

namespace detail {
inline bool all_finite(const TrajectorySample& s) {
    return std::isfinite(s.theta) && std::isfinite(s.Theta) && std::isfinite(s.y) && std::isfinite(s.U) &&
           std::isfinite(s.G_hat) && std::isfinite(s.H_hat) && std::isfinite(s.S) && std::isfinite(s.vartheta);
}
}  // namespace detail

/// Full loop. Per step: measure Theta, y -> estimate -> control U ->
/// integrate theta_hat -> apply theta = theta_hat + S at t + dt -> step PDE.
inline TrajectoryRecord run_esc(const ScenarioConfig& cfg) {
    cfg.validate_esc();
    const auto design = design_dither(cfg.dither, cfg.dither_formula);
    const double dt = cfg.solver.dt;
    const double a = cfg.dither.amplitude;
    const double w = cfg.dither.omega;

    ActuatorField field = cfg.initial_alpha.empty()
                              ? ActuatorField::constant(cfg.grid, 0.0, cfg.diffusion)
                              : ActuatorField{cfg.grid, cfg.initial_alpha, 0.0, cfg.diffusion};
    GradientHessianEstimator estimator(cfg.dither, dt, cfg.estimators.washout_corner,
                                       cfg.estimators.hessian_corner, cfg.estimators.hessian_input);
    GainConfig gains = cfg.gains;
    gains.K_bar = cfg.nominal_K_bar();
    ControllerState ctrl(gains, cfg.grid.length, dt, cfg.initial_theta_hat);

    TrajectoryRecord rec;
    rec.grid = cfg.grid;
    if (cfg.gains.K == 0.0) rec.warnings.emplace_back("K = 0: adaptation disabled");
    if (design.B_clamped) rec.warnings.emplace_back("dither normalization B clamped at its positive floor");

    field.alpha.back() = ctrl.theta_hat + dither_S(design, 0.0);
    TrajectorySample last;
    const std::size_t steps = cfg.steps();
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        TrajectorySample s;
        s.t = t;
        s.theta = field.boundary();
        s.Theta = spatial_integral(field);
        s.y = evaluate_map(cfg.map, s.Theta);
        const auto est = estimator.update(s.y, t);
        s.G_hat = est.G_hat;
        s.H_hat = est.H_hat;
        s.U = realtime_control(ctrl, s.G_hat, s.H_hat, s.Theta, t, cfg.dither);
        s.S = dither_S(design, t);
        s.vartheta = s.Theta - a * std::sin(w * t) - cfg.map.theta_star;
        if (!detail::all_finite(s)) throw SimulationError("non-finite loop signal", k, last);
        last = s;
        if (k % cfg.record_every == 0) rec.samples.push_back(s);
        if (cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0) rec.snapshots.push_back({t, field.alpha});
        if (k == steps) break;

        integrate_theta_hat(ctrl, s.U, dt);
        const double t_next = static_cast<double>(k + 1) * dt;
        try {
            step(field, ctrl.theta_hat + dither_S(design, t_next), cfg.solver);
        } catch (const NonFiniteStateError& e) {
            throw SimulationError(e.what(), k, last);
        }
        field.t = t_next;
    }
    return rec;
}

// -----------------------------------------------------------------------------
// Average system
// -----------------------------------------------------------------------------

struct AverageSample {
    double t = 0.0;
    double vartheta = 0.0;
    double u_norm = 0.0;   // ||u_av||_{L2}
    double Omega = 0.0;    // vartheta^2 + ||u_av||^2
    double Z = 0.0;
    double U = 0.0;
};

struct ProfileSnapshot {
    double t = 0.0;
    double vartheta = 0.0;
    std::vector<double> u;
};

struct AverageRecord {
    std::vector<AverageSample> samples;
    std::vector<ProfileSnapshot> profiles;
    Grid grid;
    double K_bar = 0.0;
    std::vector<std::string> warnings;
};

struct AverageSystemOptions {
    bool keep_profiles = false;
    bool enforce_admissible = true;   // false for instability probes
};

/// Average cascade d/dt vartheta = int u, u_t = u_xx, u_x(0) = 0, u(L) = U_av
/// with U_av = K G_av + K H_av int g u, G_av = H vartheta, H_av = H.
/// Crank-Nicolson on (vartheta, u); U_av is imposed implicitly at both time
/// levels, so the boundary always equals Kbar Z of the current state.
inline AverageRecord run_average_system(const ScenarioConfig& cfg, double initial_vartheta,
                                        std::span<const double> initial_u,
                                        const AverageSystemOptions& opt = {}) {
    cfg.validate();
    const std::size_t n = cfg.grid.n;
    if (initial_u.size() != n) throw std::invalid_argument("initial_u size does not match grid");
    const double K = cfg.gains.K;
    const double H = cfg.map.H;
    const double K_bar = K * H;
    AverageRecord rec;
    rec.grid = cfg.grid;
    rec.K_bar = K_bar;
    if (opt.enforce_admissible) {
        const auto check = check_gain(K_bar, cfg.grid.length);
        if (!check.admissible) throw std::invalid_argument("inadmissible gain: " + check.reason);
        if (check.near_forbidden) rec.warnings.push_back(check.reason);
    }
    const BacksteppingKernel kernel(K_bar, cfg.grid.length);

    const double dt = cfg.solver.dt;
    const double dx = cfg.grid.dx();
    const double r = cfg.diffusion * dt / (dx * dx);
    const std::size_t m = n - 1;
    const auto q = quadrature_weights(n, dx, QuadratureRule::trapezoid);
    const auto g = kernel.g_on_grid(n);

    auto interior_Q = [&](std::span<const double> v) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += q[i] * v[i];
        return s;
    };
    auto interior_G = [&](std::span<const double> v) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += q[i] * g[i] * v[i];
        return s;
    };

    const double wr = cfg.solver.scheme == Scheme::implicit_euler ? r : 0.5 * r;
    const double explicit_w = cfg.solver.scheme == Scheme::implicit_euler ? 0.0 : 0.5;
    if (cfg.solver.scheme == Scheme::explicit_euler) {
        throw std::invalid_argument("average system supports crank_nicolson or implicit_euler");
    }
    detail::ImplicitSystem sys(m, wr);
    std::vector<double> v(m, 0.0);   // response of the new level to a unit boundary value
    v[m - 1] = wr;
    sys.solve(v);
    const double Qv = interior_Q(v);
    const double Gv = interior_G(v);
    const double theta_w = 1.0 - explicit_w;   // implicit weight on the vartheta quadrature
    const double c1 = dt * theta_w * (Qv + q[m]) + Gv;
    const double denom = 1.0 - K_bar * c1;
    if (!(std::abs(denom) > 1e-14)) throw std::runtime_error("average-system step is singular for this dt");

    std::vector<double> u(initial_u.begin(), initial_u.end());
    double vartheta = initial_vartheta;
    u[m] = 0.0;
    u[m] = K_bar * (vartheta + g_moment(kernel, u));   // g(L) = 0, so the boundary node drops out

    auto sample = [&](double t) {
        AverageSample s;
        s.t = t;
        s.vartheta = vartheta;
        std::vector<double> sq(n);
        for (std::size_t i = 0; i < n; ++i) sq[i] = u[i] * u[i];
        const double u2 = integrate_grid(sq, dx);
        s.u_norm = std::sqrt(u2);
        s.Omega = vartheta * vartheta + u2;
        s.Z = vartheta + g_moment(kernel, u);
        s.U = average_control(kernel, H * vartheta, H, u, K);
        return s;
    };

    const std::size_t steps = cfg.steps();
    std::vector<double> rhs(m);
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        if (k % cfg.record_every == 0) {
            const auto s = sample(t);
            if (!std::isfinite(s.Omega) || !std::isfinite(s.U)) {
                throw std::runtime_error("non-finite average-system state at step " + std::to_string(k));
            }
            rec.samples.push_back(s);
            if (opt.keep_profiles) rec.profiles.push_back({t, vartheta, u});
        }
        if (k == steps) break;

        const double Q_old = integrate_grid(u, dx);
        if (explicit_w > 0.0) {
            const auto lap = discrete_laplacian(u, dx);
            for (std::size_t i = 0; i < m; ++i) rhs[i] = u[i] + explicit_w * dt * cfg.diffusion * lap[i];
        } else {
            for (std::size_t i = 0; i < m; ++i) rhs[i] = u[i];
        }
        sys.solve(rhs);   // particular solution with zero new boundary
        const double base_theta = vartheta + dt * (explicit_w * Q_old + theta_w * interior_Q(rhs));
        const double c0 = base_theta + interior_G(rhs);
        const double U_new = K_bar * c0 / denom;
        for (std::size_t i = 0; i < m; ++i) u[i] = rhs[i] + U_new * v[i];
        u[m] = U_new;
        vartheta = base_theta + dt * theta_w * U_new * (Qv + q[m]);
    }
    return rec;
}

// -----------------------------------------------------------------------------
// Standard ESC without actuator dynamics
// -----------------------------------------------------------------------------

struct StandardEscOptions {
    double dt = 1e-3;
    double theta_hat0 = 0.0;
    bool washout = true;
    double washout_corner = 1.0;
    double hessian_corner = 1.0;
    std::size_t record_every = 10;
};

/// Theta = theta_hat + a sin(wt), d/dt theta_hat = K G_hat, G_hat = M(t) y
/// (on the washed-out y unless options.washout is false).
inline TrajectoryRecord run_standard_esc(const StaticMap& map, const DitherParams& dither, double K,
                                         double T, const StandardEscOptions& opt = {}) {
    map.validate();
    dither.validate();
    require_excitation(dither);
    if (K < 0.0) throw std::invalid_argument("standard ESC: K must be >= 0");
    if (!(T > 0.0) || !(opt.dt > 0.0) || opt.record_every == 0) {
        throw std::invalid_argument("standard ESC: T, dt and record_every must be positive");
    }
    FirstOrderFilter washout(FilterKind::high_pass, opt.washout_corner, opt.dt);
    FirstOrderFilter smoother(FilterKind::low_pass, opt.hessian_corner, opt.dt);
    double theta_hat = opt.theta_hat0;
    TrajectoryRecord rec;
    if (K == 0.0) rec.warnings.emplace_back("K = 0: adaptation disabled");
    const auto steps = static_cast<std::size_t>(std::llround(T / opt.dt));
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * opt.dt;
        TrajectorySample s;
        s.t = t;
        s.S = dither.amplitude * std::sin(dither.omega * t);
        s.Theta = theta_hat + s.S;
        s.theta = s.Theta;
        s.y = evaluate_map(map, s.Theta);
        const double y_in = opt.washout ? washout.step(s.y) : s.y;
        s.G_hat = demod_M(dither, t) * y_in;
        s.H_hat = estimate_hessian(y_in, t, dither, smoother);
        s.U = K * s.G_hat;
        s.vartheta = theta_hat - map.theta_star;
        if (k % opt.record_every == 0) rec.samples.push_back(s);
        theta_hat += opt.dt * s.U;
    }
    return rec;
}

}  // namespace esc
