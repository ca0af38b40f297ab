#pragma once

// =============================================================================
// Distributed-diffusion compensation
// =============================================================================
// Error cascade:   d/dt vartheta = int_0^L u dx,  u_t = u_xx,  u_x(0) = 0,
//                  u(L) = U.
// Ideal law:       U = Kbar Z,  Z = vartheta + int_0^L g(y) u(y) dy,
//                  g(x) = (L^2 - x^2) / 2.
// Backstepping:    w = u - gamma(x) Z with gamma'' = A_cl gamma, gamma'(0) = 0,
//                  gamma(L) = Kbar, A_cl = Kbar L. For Kbar < 0 (A_cl = -lambda)
//                  gamma(x) = Kbar cos(sqrt(lambda) x) / cos(sqrt(lambda) L),
//                  singular when sqrt(lambda) L = (2 kappa + 1) pi / 2.
// Real-time law:   U = T{ K [G_hat + H_hat (L theta_hat - Theta + a sin wt)] },
//                  T the low-pass c/(s+c); needs only the measured Theta.
// =============================================================================

#include "esc/dither.hpp"
#include "esc/filters.hpp"
#include "esc/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace esc {

struct GainConfig {
    double K = 0.2;        // adaptation gain
    double K_bar = -0.4;   // compensator gain, nominally K * H
    double c = 10.0;       // corner of T, rad/s
};

inline double forbidden_gain(int kappa, double length) {
    const double odd = 2.0 * kappa + 1.0;
    return -odd * odd * std::numbers::pi * std::numbers::pi / (4.0 * length * length * length);
}

inline double default_gain_tolerance(double length) {
    return 1e-6 * std::numbers::pi * std::numbers::pi / (4.0 * length * length * length);
}

struct GainCheck {
    bool admissible = false;
    bool near_forbidden = false;   // admissible, but within 10x tol of a forbidden value
    std::optional<int> kappa;      // offending (or nearest flagged) index
    std::string reason;
};

inline GainCheck check_gain(double K_bar, double length, int kappa_max = 100,
                            std::optional<double> tol = std::nullopt) {
    if (!(length > 0.0)) throw std::invalid_argument("check_gain: L must be > 0");
    const double band = tol.value_or(default_gain_tolerance(length));
    GainCheck out;
    if (!std::isfinite(K_bar)) {
        out.reason = "Kbar is not finite";
        return out;
    }
    if (K_bar >= 0.0) {
        out.reason = "Kbar = " + std::to_string(K_bar) + " must be negative (Kbar = K*H with K > 0, H < 0)";
        return out;
    }
    for (int kappa = 0; kappa <= kappa_max; ++kappa) {
        const double f = forbidden_gain(kappa, length);
        const double gap = std::abs(K_bar - f);
        if (gap < band) {
            out.kappa = kappa;
            out.reason = "Kbar = " + std::to_string(K_bar) + " hits the forbidden value -(2k+1)^2 pi^2/(4 L^3) = " +
                         std::to_string(f) + " for k = " + std::to_string(kappa) +
                         " (kernel normalization vanishes)";
            return out;
        }
        if (gap < 10.0 * band && !out.near_forbidden) {
            out.near_forbidden = true;
            out.kappa = kappa;
        }
        if (f < K_bar - 10.0 * band) break;   // forbidden values only decrease with kappa
    }
    out.admissible = true;
    if (out.near_forbidden) out.reason = "Kbar is within 10x tolerance of a forbidden value; kernel is ill-conditioned";
    return out;
}

/// g(x) = (L^2 - x^2) / 2 and gamma(x) for a fixed Kbar and L.
class BacksteppingKernel {
public:
    static constexpr double kSingularCos = 1e-9;

    BacksteppingKernel(double K_bar, double length) : K_bar_(K_bar), length_(length) {
        if (!(length > 0.0)) throw std::invalid_argument("kernel length must be > 0");
        if (!std::isfinite(K_bar)) throw std::invalid_argument("Kbar must be finite");
        A_cl_ = K_bar * length;
        root_ = std::sqrt(std::abs(A_cl_));
        if (A_cl_ < 0.0) {
            const double c = std::cos(root_ * length);
            if (std::abs(c) < kSingularCos) {
                throw std::invalid_argument("kernel normalization vanishes: |cos(sqrt(lambda) L)| = " +
                                            std::to_string(std::abs(c)) + " (forbidden Kbar)");
            }
            Lambda_ = 2.0 * c;
        } else {
            Lambda_ = 2.0 * std::cosh(root_ * length);
        }
    }

    [[nodiscard]] double K_bar() const noexcept { return K_bar_; }
    [[nodiscard]] double length() const noexcept { return length_; }
    [[nodiscard]] double A_cl() const noexcept { return A_cl_; }
    [[nodiscard]] double lambda() const noexcept { return -A_cl_; }
    /// e^{sqrt(A_cl) L} + e^{-sqrt(A_cl) L}; real for either sign of A_cl.
    [[nodiscard]] double Lambda() const noexcept { return Lambda_; }

    [[nodiscard]] double g(double x) const { return 0.5 * (length_ * length_ - x * x); }

    [[nodiscard]] double gamma(double x) const {
        // ratio first so that gamma(L) == Kbar exactly
        if (A_cl_ < 0.0) return K_bar_ * (std::cos(root_ * x) / (0.5 * Lambda_));
        return K_bar_ * (std::cosh(root_ * x) / (0.5 * Lambda_));
    }

    /// Closed form of int_0^L g(y) gamma(y) dy.
    [[nodiscard]] double moment_g_gamma() const {
        const double L = length_;
        const double s = root_;
        if (s * L < 1e-4) {
            // first-order series in A_cl
            return K_bar_ * (L * L * L / 3.0 - 2.0 / 15.0 * A_cl_ * L * L * L * L * L);
        }
        const double half = 0.5 * Lambda_;
        if (A_cl_ < 0.0) {
            return K_bar_ / half * (std::sin(s * L) / (s * s * s) - L * std::cos(s * L) / (s * s));
        }
        return K_bar_ / half * (L * std::cosh(s * L) / (s * s) - std::sinh(s * L) / (s * s * s));
    }

    [[nodiscard]] std::vector<double> g_on_grid(std::size_t n) const {
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = g(node(i, n));
        return out;
    }
    [[nodiscard]] std::vector<double> gamma_on_grid(std::size_t n) const {
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = gamma(node(i, n));
        return out;
    }
    [[nodiscard]] double node(std::size_t i, std::size_t n) const {
        return i + 1 == n ? length_ : static_cast<double>(i) * (length_ / static_cast<double>(n - 1));
    }

private:
    double K_bar_;
    double length_;
    double A_cl_ = 0.0;
    double root_ = 0.0;
    double Lambda_ = 2.0;
};

inline double gamma_kernel(const BacksteppingKernel& k, double x) {
    if (x < 0.0 || x > k.length()) throw std::invalid_argument("gamma_kernel: x outside [0, L]");
    return k.gamma(x);
}

/// int_0^L g(y) u(y) dy for u sampled on the uniform grid over [0, L].
inline double g_moment(const BacksteppingKernel& k, std::span<const double> u,
                       QuadratureRule rule = QuadratureRule::trapezoid) {
    if (u.size() < 3) throw std::invalid_argument("profile needs at least 3 nodes");
    const double dx = k.length() / static_cast<double>(u.size() - 1);
    const auto w = quadrature_weights(u.size(), dx, rule);
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) sum += w[i] * k.g(k.node(i, u.size())) * u[i];
    return sum;
}

/// U = Kbar (vartheta + int g u).
inline double ideal_control(const BacksteppingKernel& k, double vartheta, std::span<const double> u,
                            QuadratureRule rule = QuadratureRule::trapezoid) {
    return k.K_bar() * (vartheta + g_moment(k, u, rule));
}

/// U_av = K G_av + K H_av int g u_av.
inline double average_control(const BacksteppingKernel& k, double G_av, double H_av,
                              std::span<const double> u_av, double K,
                              QuadratureRule rule = QuadratureRule::trapezoid) {
    return K * G_av + K * H_av * g_moment(k, u_av, rule);
}

// -----------------------------------------------------------------------------
// Real-time controller
// -----------------------------------------------------------------------------

struct ControllerState {
    double theta_hat = 0.0;
    FirstOrderFilter T_filter;
    GainConfig gains;
    double length = 1.0;

    ControllerState(const GainConfig& g, double length, double dt, double theta_hat0 = 0.0)
        : theta_hat(theta_hat0), T_filter(FilterKind::low_pass, g.c, dt), gains(g), length(length) {}
};

/// K [G_hat + H_hat (L theta_hat - Theta + a sin wt)], before the T filter.
inline double realtime_bracket(const ControllerState& s, double G_hat, double H_hat, double Theta,
                               double t, const DitherParams& dither) {
    const double moment = s.length * s.theta_hat - Theta + dither.amplitude * std::sin(dither.omega * t);
    return s.gains.K * (G_hat + H_hat * moment);
}

/// Advances T and returns U(t).
inline double realtime_control(ControllerState& s, double G_hat, double H_hat, double Theta, double t,
                               const DitherParams& dither) {
    return s.T_filter.step(realtime_bracket(s, G_hat, H_hat, Theta, t, dither));
}

/// theta_hat <- theta_hat + dt U (pure integrator).
inline double integrate_theta_hat(ControllerState& s, double U, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("integrate_theta_hat: dt must be > 0");
    s.theta_hat += dt * U;
    return s.theta_hat;
}

}  // namespace esc
