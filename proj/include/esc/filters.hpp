#pragma once

// First-order filters and the demodulation-based gradient/Hessian estimates.

#include "esc/dither.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace esc {

enum class FilterKind { low_pass, high_pass };

/// c/(s+c) (low-pass) or s/(s+c) (washout), discretised exactly for inputs
/// held constant over a step: x+ = x + (1 - e^{-c dt}) (u - x).
/// The low-pass outputs x+, the washout outputs u - x+.
class FirstOrderFilter {
public:
    FirstOrderFilter(FilterKind kind, double corner, double dt, double initial_state = 0.0)
        : kind_(kind), corner_(corner), dt_(dt), state_(initial_state) {
        if (!(corner > 0.0) || !std::isfinite(corner)) {
            throw std::invalid_argument("filter corner frequency must be > 0");
        }
        if (!(dt > 0.0)) throw std::invalid_argument("filter time step must be > 0");
        if (!std::isfinite(initial_state)) throw std::invalid_argument("filter state must be finite");
        gain_ = -std::expm1(-corner * dt);
    }

    double step(double input) {
        state_ += gain_ * (input - state_);
        return kind_ == FilterKind::low_pass ? state_ : input - state_;
    }

    [[nodiscard]] FilterKind kind() const noexcept { return kind_; }
    [[nodiscard]] double corner() const noexcept { return corner_; }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] double state() const noexcept { return state_; }
    void reset(double state = 0.0) { state_ = state; }

private:
    FilterKind kind_;
    double corner_;
    double dt_;
    double gain_ = 0.0;
    double state_;
};

inline double filter_step(FirstOrderFilter& f, double input) { return f.step(input); }

inline constexpr double kMinDitherAmplitude = 1e-9;

inline void require_excitation(const DitherParams& p) {
    if (!(p.amplitude >= kMinDitherAmplitude)) {
        throw std::invalid_argument("dither amplitude a = " + std::to_string(p.amplitude) +
                                    " is below 1e-9; gradient/Hessian demodulation needs excitation");
    }
}

/// G_hat = M(t) * washout(y).
inline double estimate_gradient(double y, double t, const DitherParams& p, FirstOrderFilter& washout) {
    require_excitation(p);
    return demod_M(p, t) * washout.step(y);
}

/// H_hat = lowpass(N(t) * y_signal). Callers decide whether y_signal is the
/// raw or the washed-out output.
inline double estimate_hessian(double y_signal, double t, const DitherParams& p,
                               FirstOrderFilter& smoother) {
    require_excitation(p);
    return smoother.step(demod_N(p, t) * y_signal);
}

struct EstimatorOutputs {
    double G_hat = 0.0;
    double H_hat = 0.0;
    double y_washed = 0.0;
};

enum class HessianInput { washed, raw };

/// The estimator pair used by the loop: one washout shared by both
/// demodulations (unless HessianInput::raw) and a low-pass on the Hessian.
class GradientHessianEstimator {
public:
    GradientHessianEstimator(const DitherParams& p, double dt, double washout_corner,
                             double hessian_corner, HessianInput hessian_input = HessianInput::washed)
        : params_(p),
          washout_(FilterKind::high_pass, washout_corner, dt),
          smoother_(FilterKind::low_pass, hessian_corner, dt),
          hessian_input_(hessian_input) {
        require_excitation(p);
    }

    EstimatorOutputs update(double y, double t) {
        EstimatorOutputs out;
        out.y_washed = washout_.step(y);
        out.G_hat = demod_M(params_, t) * out.y_washed;
        const double h_in = hessian_input_ == HessianInput::washed ? out.y_washed : y;
        out.H_hat = estimate_hessian(h_in, t, params_, smoother_);
        return out;
    }

private:
    DitherParams params_;
    FirstOrderFilter washout_;
    FirstOrderFilter smoother_;
    HessianInput hessian_input_;
};

}  // namespace esc
