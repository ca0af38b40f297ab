#pragma once

// =============================================================================
// Quadrature helpers
// =============================================================================
// Gauss-Legendre rules for smooth integrands given as callables, and
// composite Newton-Cotes rules for values sampled on a uniform grid.
// =============================================================================

#include <cmath>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace esc {

struct GaussLegendreRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// Nodes and weights of the n-point Gauss-Legendre rule, by Newton iteration
/// on P_n from the Chebyshev initial guess.
inline GaussLegendreRule gauss_legendre_rule(std::size_t n) {
    if (n == 0) throw std::invalid_argument("gauss_legendre_rule: n must be positive");
    const double nd = static_cast<double>(n);
    // returns {P_n(x), P_n'(x)}
    auto legendre = [n, nd](double x) {
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double kk = static_cast<double>(k);
            const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
            p0 = p1;
            p1 = p2;
        }
        return std::pair{p1, nd * (x * p1 - p0) / (x * x - 1.0)};
    };

    GaussLegendreRule rule{std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = legendre(x);
            const double step = p / dp;
            x -= step;
            if (std::abs(step) < 1e-16) break;
        }
        const double dp = legendre(x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

/// Composite Gauss-Legendre integral of f over [a, b] with `panels` equal panels.
template <typename F>
    requires std::invocable<F, double>
double integrate_gauss_legendre(F&& f, double a, double b, const GaussLegendreRule& rule,
                                std::size_t panels = 1) {
    if (panels == 0) throw std::invalid_argument("integrate_gauss_legendre: panels must be positive");
    const double h = (b - a) / static_cast<double>(panels);
    double total = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + h * static_cast<double>(p);
        const double mid = lo + 0.5 * h;
        double sum = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            sum += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
        }
        total += 0.5 * h * sum;
    }
    return total;
}

template <typename F>
    requires std::invocable<F, double>
double integrate_gauss_legendre(F&& f, double a, double b, std::size_t nodes = 64,
                                std::size_t panels = 1) {
    return integrate_gauss_legendre(std::forward<F>(f), a, b, gauss_legendre_rule(nodes), panels);
}

// -----------------------------------------------------------------------------
// Grid rules
// -----------------------------------------------------------------------------

enum class QuadratureRule {
    trapezoid,
    simpson,   // falls back to trapezoid when the node count is even
};

/// Weights w_i such that sum w_i f(x_i) approximates the integral over a
/// uniform grid with n nodes and spacing dx.
inline std::vector<double> quadrature_weights(std::size_t n, double dx,
                                              QuadratureRule rule = QuadratureRule::trapezoid) {
    if (n < 2) throw std::invalid_argument("quadrature_weights: need at least two nodes");
    std::vector<double> w(n, dx);
    if (rule == QuadratureRule::simpson && n % 2 == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = (i == 0 || i == n - 1) ? dx / 3.0 : (i % 2 == 1 ? 4.0 * dx / 3.0 : 2.0 * dx / 3.0);
        }
        return w;
    }
    w.front() = 0.5 * dx;
    w.back() = 0.5 * dx;
    return w;
}

inline double integrate_grid(std::span<const double> values, double dx,
                             QuadratureRule rule = QuadratureRule::trapezoid) {
    const std::size_t n = values.size();
    if (n < 2) throw std::invalid_argument("integrate_grid: need at least two nodes");
    double sum = 0.0;
    if (rule == QuadratureRule::simpson && n % 2 == 1) {
        for (std::size_t i = 1; i + 1 < n; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * values[i];
        return dx / 3.0 * (values.front() + sum + values.back());
    }
    for (std::size_t i = 1; i + 1 < n; ++i) sum += values[i];
    return dx * (0.5 * values.front() + sum + 0.5 * values.back());
}

}  // namespace esc
