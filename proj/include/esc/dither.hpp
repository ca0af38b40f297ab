#pragma once

// =============================================================================
// Dither design for distributed diffusion actuation
// =============================================================================
// The additive perturbation S(t) is applied at the Dirichlet end x = L of
//
//     beta_t = beta_xx,   beta_x(0, t) = 0,   beta(L, t) = S(t)
//
// and is chosen so that the spatial integral of the resulting field equals
// a*sin(omega*t). The reference field is
//
//     beta(x, t) = A/2 e^{ k x} sin(omega t + phi + k x)
//                + A/2 e^{-k x} sin(omega t + phi - k x),   k = sqrt(omega/2)
//
// Integrating gives (A / (2 sqrt(omega))) * Im{(e^{kL} e^{j(kL - pi/4)}
// - e^{-kL} e^{j(-kL - pi/4)}) e^{j(omega t + phi)}}, so A and phi follow
// from the magnitude B and argument psi of that complex number.
//
// Two closed forms are provided. `consistent` is the magnitude/argument of the
// expression above and satisfies the integral constraint exactly. `published`
// keeps the widely quoted closed form whose second exponential term carries
// the opposite sign; it reproduces the commonly reported constants
// (A = 0.1356, phi = -1.4618 rad at a = 0.2, omega = 10, L = 1) but leaves an
// O(1e-3) residual in the integral constraint.
// =============================================================================

#include "esc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace esc {

struct DitherParams {
    double amplitude = 0.2;   // a, input units
    double omega = 10.0;      // rad/s
    double length = 1.0;      // L, m

    /// Throws std::invalid_argument unless a >= 0, omega > 0, L > 0 and all finite.
    /// a = 0 is allowed here (degenerate design); the closed loop rejects it.
    void validate() const {
        if (!std::isfinite(amplitude) || !std::isfinite(omega) || !std::isfinite(length)) {
            throw std::invalid_argument("dither parameters must be finite");
        }
        if (amplitude < 0.0) throw std::invalid_argument("dither amplitude a must be >= 0");
        if (omega <= 0.0) throw std::invalid_argument("dither frequency omega must be > 0");
        if (length <= 0.0) throw std::invalid_argument("domain length L must be > 0");
    }

    [[nodiscard]] double wavenumber() const { return std::sqrt(omega / 2.0); }
    [[nodiscard]] double period() const { return 2.0 * std::numbers::pi / omega; }
};

enum class DitherFormula {
    consistent,   // exact solution of the integral constraint (default)
    published,    // printed closed form; reproduces the reported constants
};

inline const char* to_string(DitherFormula f) {
    return f == DitherFormula::consistent ? "consistent" : "published";
}

inline DitherFormula parse_dither_formula(const std::string& s) {
    if (s == "consistent") return DitherFormula::consistent;
    if (s == "published") return DitherFormula::published;
    throw std::invalid_argument("unknown dither formula '" + s + "' (expected consistent|published)");
}

struct PhaseComponents {
    double psi1 = 0.0;
    double psi2 = 0.0;
};

struct NormalizationB {
    double value = 0.0;
    bool clamped = false;   // radicand fell below the positive floor
};

struct DitherDesign {
    DitherParams params;
    DitherFormula formula = DitherFormula::consistent;
    double A = 0.0;
    double phi = 0.0;
    double B = 0.0;
    double psi = 0.0;
    double psi1 = 0.0;
    double psi2 = 0.0;
    bool B_clamped = false;
    // |B_published - B_consistent| and the wrapped phase gap, kept for reporting
    double formula_gap_B = 0.0;
    double formula_gap_psi = 0.0;

    /// Upper bound on |S(t)|: (A/2)(e^{kL} + e^{-kL}).
    [[nodiscard]] double envelope() const {
        const double kL = params.wavenumber() * params.length;
        return 0.5 * A * (std::exp(kL) + std::exp(-kL));
    }
};

inline constexpr double kPsiZeroTolerance = 1e-12;

inline PhaseComponents phase_components(const DitherParams& p, DitherFormula formula) {
    const double kL = p.wavenumber() * p.length;
    const double quarter = std::numbers::pi / 4.0;
    const double ep = std::exp(kL);
    const double em = std::exp(-kL);
    const double sign = formula == DitherFormula::published ? 1.0 : -1.0;
    return {ep * std::sin(kL - quarter) + sign * em * std::sin(-kL - quarter),
            ep * std::cos(kL - quarter) + sign * em * std::cos(-kL - quarter)};
}

/// Normalization constant B. The published form is evaluated as printed,
/// e^{L sqrt(2w)} + e^{-L sqrt(2w)} + 2 cos(L sqrt(2w)) under the root; the
/// consistent form uses 2 sqrt(sinh^2(kL) + sin^2(kL)), the cancellation-free
/// rewrite of e^{2kL} + e^{-2kL} - 2 cos(2kL).
inline NormalizationB compute_B(const DitherParams& p, DitherFormula formula) {
    p.validate();
    if (formula == DitherFormula::published) {
        const double s = p.length * std::sqrt(2.0 * p.omega);
        double radicand = std::exp(s) + std::exp(-s) + 2.0 * std::cos(s);
        constexpr double floor = 1e-300;
        const bool clamped = !(radicand > floor);
        if (clamped) radicand = floor;
        return {std::sqrt(radicand), clamped};
    }
    const double kL = p.wavenumber() * p.length;
    const double sh = std::sinh(kL);
    const double sn = std::sin(kL);
    return {2.0 * std::sqrt(sh * sh + sn * sn), false};
}

/// Three-branch phase: sign(psi1) pi/2 when psi2 ~ 0, atan(psi1/psi2) when
/// psi2 > 0, pi + atan(psi1/psi2) when psi2 < 0.
inline double psi_from_components(PhaseComponents c, double zero_tol = kPsiZeroTolerance) {
    if (std::abs(c.psi2) < zero_tol * std::max(1.0, std::abs(c.psi1))) {
        return (c.psi1 > 0.0 ? 1.0 : (c.psi1 < 0.0 ? -1.0 : 0.0)) * std::numbers::pi / 2.0;
    }
    if (c.psi2 > 0.0) return std::atan(c.psi1 / c.psi2);
    return std::numbers::pi + std::atan(c.psi1 / c.psi2);
}

inline double compute_psi(const DitherParams& p, DitherFormula formula,
                          double zero_tol = kPsiZeroTolerance) {
    p.validate();
    return psi_from_components(phase_components(p, formula), zero_tol);
}

namespace detail {
inline double wrap_angle(double a) {
    const double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a > std::numbers::pi) a -= two_pi;
    if (a <= -std::numbers::pi) a += two_pi;
    return a;
}
}  // namespace detail

inline DitherDesign design_dither(const DitherParams& p,
                                  DitherFormula formula = DitherFormula::consistent) {
    p.validate();
    DitherDesign d;
    d.params = p;
    d.formula = formula;
    const auto comps = phase_components(p, formula);
    const auto B = compute_B(p, formula);
    d.psi1 = comps.psi1;
    d.psi2 = comps.psi2;
    d.B = B.value;
    d.B_clamped = B.clamped;
    d.psi = psi_from_components(comps);
    d.A = 2.0 * p.amplitude * std::sqrt(p.omega) / d.B;
    d.phi = -d.psi;

    const DitherFormula other =
        formula == DitherFormula::consistent ? DitherFormula::published : DitherFormula::consistent;
    d.formula_gap_B = std::abs(compute_B(p, other).value - d.B);
    d.formula_gap_psi =
        std::abs(detail::wrap_angle(psi_from_components(phase_components(p, other)) - d.psi));
    return d;
}

/// Reference field beta(x, t) on 0 <= x <= L.
inline double beta_field(const DitherDesign& d, double x, double t) {
    const double k = d.params.wavenumber();
    const double wt = d.params.omega * t + d.phi;
    const double kx = k * x;
    return 0.5 * d.A * std::exp(kx) * std::sin(wt + kx) +
           0.5 * d.A * std::exp(-kx) * std::sin(wt - kx);
}

/// Boundary perturbation S(t) = beta(L, t).
inline double dither_S(const DitherDesign& d, double t) {
    return beta_field(d, d.params.length, t);
}

/// Gradient demodulation M(t) = (2/a) sin(omega t).
inline double demod_M(const DitherParams& p, double t) {
    return 2.0 / p.amplitude * std::sin(p.omega * t);
}

/// Hessian demodulation N(t) = -(8/a^2) cos(2 omega t).
inline double demod_N(const DitherParams& p, double t) {
    return -8.0 / (p.amplitude * p.amplitude) * std::cos(2.0 * p.omega * t);
}

/// Spatial integral of beta(., t) over [0, L] by composite Gauss-Legendre.
inline double beta_integral(const DitherDesign& d, double t, const GaussLegendreRule& rule,
                            std::size_t panels = 1) {
    return integrate_gauss_legendre([&](double x) { return beta_field(d, x, t); }, 0.0,
                                    d.params.length, rule, panels);
}

struct IdentityReport {
    double max_residual = 0.0;
    double worst_time = 0.0;
    std::size_t samples = 0;
    bool passed = false;
};

/// Checks int_0^L beta(x, t) dx = a sin(omega t) at every sample time.
inline IdentityReport verify_integral_identity(const DitherDesign& d,
                                               std::span<const double> t_samples, double tol,
                                               std::size_t gl_nodes = 64) {
    if (t_samples.empty()) throw std::invalid_argument("verify_integral_identity: no sample times");
    if (!(tol > 0.0)) throw std::invalid_argument("verify_integral_identity: tol must be > 0");
    const auto rule = gauss_legendre_rule(gl_nodes);
    IdentityReport r;
    r.samples = t_samples.size();
    for (double t : t_samples) {
        const double target = d.params.amplitude * std::sin(d.params.omega * t);
        const double res = std::abs(beta_integral(d, t, rule) - target);
        if (res >= r.max_residual) {
            r.max_residual = res;
            r.worst_time = t;
        }
    }
    r.passed = r.max_residual < tol;
    return r;
}

/// n equally spaced times covering one dither period [0, 2 pi / omega).
inline std::vector<double> one_period_samples(const DitherParams& p, std::size_t n) {
    std::vector<double> ts(n);
    for (std::size_t i = 0; i < n; ++i) {
        ts[i] = p.period() * static_cast<double>(i) / static_cast<double>(n);
    }
    return ts;
}

}  // namespace esc
