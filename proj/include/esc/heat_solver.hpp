#pragma once

// =============================================================================
// 1-D diffusion actuator
// =============================================================================
//     alpha_t = eps * alpha_xx,  alpha_x(0, t) = 0,  alpha(L, t) = theta(t)
//     Theta(t) = int_0^L alpha(x, t) dx
//
// Uniform grid x_i = i dx, i = 0..n-1. The Neumann end uses the mirror node
// alpha_{-1} = alpha_1, the Dirichlet node n-1 holds the applied boundary
// value. Implicit systems are tridiagonal and solved with the Thomas
// algorithm.
// =============================================================================

#include "esc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace esc {

struct Grid {
    double length = 1.0;
    std::size_t n = 101;

    static Grid uniform(double length, std::size_t n) {
        Grid g{length, n};
        g.validate();
        return g;
    }

    void validate() const {
        if (!(length > 0.0) || !std::isfinite(length)) throw std::invalid_argument("grid length must be > 0");
        if (n < 3) throw std::invalid_argument("grid needs at least 3 nodes");
    }

    [[nodiscard]] double dx() const { return length / static_cast<double>(n - 1); }
    [[nodiscard]] double x(std::size_t i) const {
        return i + 1 == n ? length : static_cast<double>(i) * dx();
    }
    [[nodiscard]] std::vector<double> nodes() const {
        std::vector<double> xs(n);
        for (std::size_t i = 0; i < n; ++i) xs[i] = x(i);
        return xs;
    }
};

enum class Scheme { crank_nicolson, implicit_euler, explicit_euler };

inline const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::crank_nicolson: return "crank_nicolson";
        case Scheme::implicit_euler: return "implicit_euler";
        case Scheme::explicit_euler: return "explicit_euler";
    }
    return "?";
}

inline Scheme parse_scheme(const std::string& s) {
    if (s == "crank_nicolson") return Scheme::crank_nicolson;
    if (s == "implicit_euler") return Scheme::implicit_euler;
    if (s == "explicit_euler") return Scheme::explicit_euler;
    throw std::invalid_argument("unknown scheme '" + s +
                                "' (expected crank_nicolson|implicit_euler|explicit_euler)");
}

struct SolverConfig {
    double dt = 1e-3;
    Scheme scheme = Scheme::crank_nicolson;
};

struct ActuatorField {
    Grid grid;
    std::vector<double> alpha;
    double t = 0.0;
    double diffusion = 1.0;

    static ActuatorField constant(const Grid& g, double value, double diffusion = 1.0) {
        g.validate();
        return {g, std::vector<double>(g.n, value), 0.0, diffusion};
    }

    template <typename F>
        requires std::invocable<F, double>
    static ActuatorField sampled(const Grid& g, F&& f, double diffusion = 1.0) {
        g.validate();
        ActuatorField field{g, std::vector<double>(g.n), 0.0, diffusion};
        for (std::size_t i = 0; i < g.n; ++i) field.alpha[i] = f(g.x(i));
        return field;
    }

    [[nodiscard]] double boundary() const { return alpha.back(); }
};

class NonFiniteStateError : public std::runtime_error {
public:
    NonFiniteStateError(std::size_t node, double t)
        : std::runtime_error("non-finite actuator state at node " + std::to_string(node) +
                             " (t = " + std::to_string(t) + ")"),
          node_(node) {}
    [[nodiscard]] std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

namespace detail {

/// Solves a tridiagonal system in place. lower[0] and upper[n-1] are unused.
/// rhs is overwritten with the solution.
inline void thomas_solve(std::span<const double> lower, std::span<const double> diag,
                         std::span<const double> upper, std::span<double> rhs,
                         std::vector<double>& scratch) {
    const std::size_t n = diag.size();
    scratch.resize(n);
    double denom = diag[0];
    scratch[0] = upper[0] / denom;
    rhs[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - lower[i] * scratch[i - 1];
        scratch[i] = i + 1 < n ? upper[i] / denom : 0.0;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}

/// (I - w r D) for the unknown nodes 0..m-1, D the mirrored-Neumann second
/// difference scaled by dx^2 (the Dirichlet coupling goes into the rhs).
class ImplicitSystem {
public:
    ImplicitSystem(std::size_t m, double wr)
        : lower_(m, -wr), diag_(m, 1.0 + 2.0 * wr), upper_(m, -wr) {
        upper_[0] = -2.0 * wr;
    }
    void solve(std::span<double> rhs) { thomas_solve(lower_, diag_, upper_, rhs, scratch_); }

private:
    std::vector<double> lower_, diag_, upper_, scratch_;
};

inline void check_finite(std::span<const double> v, double t) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) throw NonFiniteStateError(i, t);
    }
}

}  // namespace detail

/// Discrete Laplacian at the unknown nodes 0..n-2, with the mirrored Neumann
/// node and the Dirichlet value alpha[n-1].
inline std::vector<double> discrete_laplacian(std::span<const double> alpha, double dx) {
    const std::size_t m = alpha.size() - 1;
    std::vector<double> lap(m);
    const double inv = 1.0 / (dx * dx);
    lap[0] = 2.0 * (alpha[1] - alpha[0]) * inv;
    for (std::size_t i = 1; i < m; ++i) lap[i] = (alpha[i + 1] - 2.0 * alpha[i] + alpha[i - 1]) * inv;
    return lap;
}

/// Rejects invalid step sizes, including explicit steps above dx^2 / (2 eps).
inline void validate_solver(const SolverConfig& cfg, const Grid& grid, double diffusion) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw std::invalid_argument("time step dt must be > 0");
    if (!(diffusion > 0.0)) throw std::invalid_argument("diffusion coefficient must be > 0");
    if (cfg.scheme == Scheme::explicit_euler) {
        const double limit = grid.dx() * grid.dx() / (2.0 * diffusion);
        if (cfg.dt > limit) {
            throw std::invalid_argument("explicit Euler unstable: dt = " + std::to_string(cfg.dt) +
                                        " exceeds dx^2/(2 eps) = " + std::to_string(limit));
        }
    }
}

/// Advances the field by one step of cfg.dt in place. The Dirichlet node is
/// set to boundary_theta (the value at t + dt); Crank-Nicolson averages it
/// with the previous boundary value alpha[n-1].
inline void step(ActuatorField& field, double boundary_theta, const SolverConfig& cfg) {
    const Grid& g = field.grid;
    validate_solver(cfg, g, field.diffusion);
    if (field.alpha.size() != g.n) throw std::invalid_argument("field size does not match grid");
    if (!std::isfinite(boundary_theta)) throw std::invalid_argument("boundary value must be finite");
    detail::check_finite(field.alpha, field.t);

    const std::size_t m = g.n - 1;   // unknowns 0..m-1
    const double dx = g.dx();
    const double r = field.diffusion * cfg.dt / (dx * dx);

    if (cfg.scheme == Scheme::explicit_euler) {
        const auto lap = discrete_laplacian(field.alpha, dx);
        for (std::size_t i = 0; i < m; ++i) field.alpha[i] += field.diffusion * cfg.dt * lap[i];
    } else {
        // implicit weight theta: 1 for implicit Euler, 1/2 for Crank-Nicolson
        const double w = cfg.scheme == Scheme::implicit_euler ? 1.0 : 0.5;
        std::vector<double> rhs(field.alpha.begin(), field.alpha.begin() + static_cast<std::ptrdiff_t>(m));
        if (w < 1.0) {
            const auto lap = discrete_laplacian(field.alpha, dx);
            for (std::size_t i = 0; i < m; ++i) rhs[i] += (1.0 - w) * field.diffusion * cfg.dt * lap[i];
        }
        rhs[m - 1] += w * r * boundary_theta;
        detail::ImplicitSystem(m, w * r).solve(rhs);
        std::copy(rhs.begin(), rhs.end(), field.alpha.begin());
    }
    field.alpha.back() = boundary_theta;
    field.t += cfg.dt;
    detail::check_finite(field.alpha, field.t);
}

/// Value-returning variant of step().
[[nodiscard]] inline ActuatorField stepped(ActuatorField field, double boundary_theta,
                                           const SolverConfig& cfg) {
    step(field, boundary_theta, cfg);
    return field;
}

/// Theta = int_0^L alpha dx on the solver grid.
inline double spatial_integral(const ActuatorField& field,
                               QuadratureRule rule = QuadratureRule::trapezoid) {
    return integrate_grid(field.alpha, field.grid.dx(), rule);
}

// -----------------------------------------------------------------------------
// Refinement study against an exact solution
// -----------------------------------------------------------------------------

struct Refinement {
    std::size_t n;
    double dt;
};

enum class ConvergenceAxis { space, time };

struct ConvergenceStudy {
    std::vector<double> steps;    // dx or dt per level
    std::vector<double> errors;   // max-norm error at the final time
    double order = 0.0;
    bool inconclusive = false;
};

/// Least-squares slope of log(error) against log(dx) (or log(dt)). The exact
/// solution supplies the initial state and the Dirichlet data; each level is
/// integrated to t_final (rounded to a whole number of steps).
template <typename Exact>
    requires std::invocable<Exact, double, double>
ConvergenceStudy convergence_order(Exact&& exact, std::span<const Refinement> levels, double length,
                                   double t_final, Scheme scheme = Scheme::crank_nicolson,
                                   ConvergenceAxis axis = ConvergenceAxis::space,
                                   double error_floor = 1e-12) {
    if (levels.size() < 3) throw std::invalid_argument("convergence_order: need at least 3 levels");
    ConvergenceStudy study;
    for (const auto& level : levels) {
        const Grid g = Grid::uniform(length, level.n);
        auto field = ActuatorField::sampled(g, [&](double x) { return exact(x, 0.0); });
        const auto steps = static_cast<std::size_t>(std::llround(t_final / level.dt));
        const SolverConfig cfg{level.dt, scheme};
        for (std::size_t k = 1; k <= steps; ++k) {
            step(field, exact(length, static_cast<double>(k) * level.dt), cfg);
        }
        double err = 0.0;
        const double t_end = static_cast<double>(steps) * level.dt;
        for (std::size_t i = 0; i < g.n; ++i) err = std::max(err, std::abs(field.alpha[i] - exact(g.x(i), t_end)));
        study.steps.push_back(axis == ConvergenceAxis::space ? g.dx() : level.dt);
        study.errors.push_back(err);
    }
    if (*std::max_element(study.errors.begin(), study.errors.end()) < error_floor) {
        study.inconclusive = true;
        return study;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(levels.size());
    for (std::size_t i = 0; i < study.errors.size(); ++i) {
        const double lx = std::log(study.steps[i]);
        const double ly = std::log(std::max(study.errors[i], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    study.order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return study;
}

}  // namespace esc
