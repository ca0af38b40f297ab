#pragma once

// =============================================================================
// Post-processing: late-time statistics, backstepping transform checks,
// exponential decay fits and residual scaling exponents.
// =============================================================================

#include "esc/closed_loop.hpp"
#include "esc/controller.hpp"
#include "esc/format.hpp"
#include "esc/heat_solver.hpp"
#include "esc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace esc {

// -----------------------------------------------------------------------------
// Late-time statistics
// -----------------------------------------------------------------------------

struct LateTimeStats {
    double window_start = 0.0;
    std::size_t samples = 0;
    double mean_abs_y_error = 0.0;       // mean |y - y*|
    double max_abs_y_error = 0.0;
    double mean_abs_Theta_error = 0.0;   // mean |Theta - Theta*|
    double max_abs_Theta_error = 0.0;
    double max_abs_theta_error = 0.0;    // max |theta - Theta*|
    double mean_H_hat = 0.0;
    double min_H_hat = 0.0;
    double max_H_hat = 0.0;
    double mean_vartheta = 0.0;
};

/// Statistics over samples with t >= t_end - window.
inline LateTimeStats late_time_stats(const TrajectoryRecord& rec, const StaticMap& map, double window) {
    if (rec.samples.empty()) throw std::invalid_argument("late_time_stats: empty trajectory");
    if (!(window > 0.0)) throw std::invalid_argument("late_time_stats: window must be > 0");
    LateTimeStats s;
    s.window_start = rec.samples.back().t - window;
    s.min_H_hat = std::numeric_limits<double>::infinity();
    s.max_H_hat = -std::numeric_limits<double>::infinity();
    for (const auto& p : rec.samples) {
        if (p.t < s.window_start - 1e-12) continue;
        ++s.samples;
        const double ey = std::abs(p.y - map.y_star);
        const double eT = std::abs(p.Theta - map.theta_star);
        s.mean_abs_y_error += ey;
        s.mean_abs_Theta_error += eT;
        s.max_abs_y_error = std::max(s.max_abs_y_error, ey);
        s.max_abs_Theta_error = std::max(s.max_abs_Theta_error, eT);
        s.max_abs_theta_error = std::max(s.max_abs_theta_error, std::abs(p.theta - map.theta_star));
        s.mean_H_hat += p.H_hat;
        s.min_H_hat = std::min(s.min_H_hat, p.H_hat);
        s.max_H_hat = std::max(s.max_H_hat, p.H_hat);
        s.mean_vartheta += p.vartheta;
    }
    const double n = static_cast<double>(s.samples);
    s.mean_abs_y_error /= n;
    s.mean_abs_Theta_error /= n;
    s.mean_H_hat /= n;
    s.mean_vartheta /= n;
    return s;
}

// -----------------------------------------------------------------------------
// Average-estimate identities
// -----------------------------------------------------------------------------

struct AverageEstimates {
    double G_av = 0.0;   // period average of M(t) y(t)
    double H_av = 0.0;   // period average of N(t) y(t)
};

/// Period averages of M y and N y for y = Q(Theta* + vartheta + a sin wt),
/// vartheta frozen; uniform samples over one period (exact for trigonometric
/// polynomials of low degree).
inline AverageEstimates period_average_estimates(const StaticMap& map, const DitherParams& p,
                                                 double vartheta, std::size_t samples = 256) {
    require_excitation(p);
    if (samples < 8) throw std::invalid_argument("period_average_estimates: need at least 8 samples");
    AverageEstimates out;
    const auto ts = one_period_samples(p, samples);
    for (double t : ts) {
        const double y = evaluate_map(map, map.theta_star + vartheta + p.amplitude * std::sin(p.omega * t));
        out.G_av += demod_M(p, t) * y;
        out.H_av += demod_N(p, t) * y;
    }
    out.G_av /= static_cast<double>(samples);
    out.H_av /= static_cast<double>(samples);
    return out;
}

// -----------------------------------------------------------------------------
// Backstepping transform
// -----------------------------------------------------------------------------

struct TargetState {
    double Z = 0.0;
    std::vector<double> w;
};

struct PlantState {
    double vartheta = 0.0;
    std::vector<double> u;
};

/// Source of int g gamma in the inverse transform.
enum class KernelMoment { analytic, quadrature };

/// Z = vartheta + int g u, w = u - gamma Z.
inline TargetState to_target(const BacksteppingKernel& k, double vartheta, std::span<const double> u,
                             QuadratureRule rule = QuadratureRule::trapezoid) {
    TargetState ts;
    ts.Z = vartheta + g_moment(k, u, rule);
    const auto gamma = k.gamma_on_grid(u.size());
    ts.w.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) ts.w[i] = u[i] - gamma[i] * ts.Z;
    return ts;
}

/// u = w + gamma Z, vartheta = (1 - int g gamma) Z - int g w.
inline PlantState from_target(const BacksteppingKernel& k, const TargetState& ts,
                              KernelMoment moment = KernelMoment::analytic,
                              QuadratureRule rule = QuadratureRule::trapezoid) {
    const auto gamma = k.gamma_on_grid(ts.w.size());
    const double m = moment == KernelMoment::analytic ? k.moment_g_gamma() : g_moment(k, gamma, rule);
    PlantState ps;
    ps.vartheta = (1.0 - m) * ts.Z - g_moment(k, ts.w, rule);
    ps.u.resize(ts.w.size());
    for (std::size_t i = 0; i < ts.w.size(); ++i) ps.u[i] = ts.w[i] + gamma[i] * ts.Z;
    return ps;
}

struct TargetResidualReport {
    double max_Zdot_residual = 0.0;   // max |Zdot - A_cl Z|, central differences
    double max_wL = 0.0;              // max |w(L, t)|
    double max_heat_residual = 0.0;   // max |w_t - w_xx| over interior nodes
    double discretization_scale = 0.0;   // dx^2 + dt
    std::size_t samples_used = 0;
    bool inconclusive = false;
    std::vector<std::string> warnings;
};

struct TargetResidualOptions {
    double skip_time = 0.25;   // excluded from the Zdot and heat residuals (initial layer)
    double conditioning_limit = 1e3;   // warn when max |gamma| / |Kbar| exceeds this
};

/// Needs rec.profiles (run_average_system with keep_profiles).
inline TargetResidualReport target_residuals(const AverageRecord& rec, const BacksteppingKernel& k,
                                             const TargetResidualOptions& opt = {}) {
    TargetResidualReport r;
    const auto& prof = rec.profiles;
    if (prof.size() < 3) {
        r.inconclusive = true;
        r.warnings.emplace_back("fewer than 3 recorded profiles; residuals need central differences");
        return r;
    }
    const std::size_t n = prof.front().u.size();
    const double dx = k.length() / static_cast<double>(n - 1);
    const double h = prof[1].t - prof[0].t;
    r.discretization_scale = dx * dx + h;

    double gmax = 0.0;
    for (double v : k.gamma_on_grid(n)) gmax = std::max(gmax, std::abs(v));
    if (gmax > opt.conditioning_limit * std::abs(k.K_bar())) {
        r.warnings.emplace_back("kernel ill-conditioned: max |gamma| / |Kbar| = " + format_general(gmax / std::abs(k.K_bar()), 6) +
                                " (Kbar near a forbidden value)");
    }
    const auto check = check_gain(k.K_bar(), k.length());
    if (check.near_forbidden) r.warnings.push_back(check.reason);

    std::vector<TargetState> ts;
    ts.reserve(prof.size());
    for (const auto& p : prof) {
        ts.push_back(to_target(k, p.vartheta, p.u));
        r.max_wL = std::max(r.max_wL, std::abs(ts.back().w.back()));
    }
    for (std::size_t j = 1; j + 1 < prof.size(); ++j) {
        if (prof[j].t < opt.skip_time) continue;
        const double span = prof[j + 1].t - prof[j - 1].t;
        const double Zdot = (ts[j + 1].Z - ts[j - 1].Z) / span;
        r.max_Zdot_residual = std::max(r.max_Zdot_residual, std::abs(Zdot - k.A_cl() * ts[j].Z));
        const auto lap = discrete_laplacian(ts[j].w, dx);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double wt = (ts[j + 1].w[i] - ts[j - 1].w[i]) / span;
            r.max_heat_residual = std::max(r.max_heat_residual, std::abs(wt - lap[i]));
        }
        ++r.samples_used;
    }
    if (r.samples_used == 0) {
        r.inconclusive = true;
        r.warnings.emplace_back("no profiles after the skip window");
    }
    return r;
}

// -----------------------------------------------------------------------------
// Exponential decay fit
// -----------------------------------------------------------------------------

struct DecayFit {
    double eta_hat = 0.0;     // exp(intercept) / Omega(0)
    double nu_hat = 0.0;      // -slope of log Omega
    double r_squared = 0.0;
    double window_start = 0.0;
    std::size_t points = 0;
    std::size_t excluded = 0;   // non-positive Omega values dropped
    bool degenerate = false;    // Omega reached the rounding floor or too few points
    std::string note;
};

inline constexpr double kOmegaFloor = 1e-290;

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope x.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 paired points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_line: abscissae are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

/// Least squares on log Omega against t over the trailing `window` fraction.
inline DecayFit fit_decay(std::span<const double> t, std::span<const double> Omega, double window = 0.5) {
    if (t.size() != Omega.size() || t.empty()) throw std::invalid_argument("fit_decay: mismatched or empty series");
    if (!(window > 0.0 && window <= 1.0)) throw std::invalid_argument("fit_decay: window must be in (0, 1]");
    DecayFit f;
    const double t0 = t.front();
    const double t1 = t.back();
    f.window_start = t1 - window * (t1 - t0);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < f.window_start) continue;
        if (!(Omega[i] > 0.0)) {
            ++f.excluded;
            continue;
        }
        if (Omega[i] < kOmegaFloor) f.degenerate = true;
        xs.push_back(t[i]);
        ys.push_back(std::log(Omega[i]));
    }
    if (f.excluded > 0) f.note = std::to_string(f.excluded) + " non-positive Omega samples excluded";
    f.points = xs.size();
    if (xs.size() < 3) {
        f.degenerate = true;
        f.note = "fewer than 3 usable samples in the fit window";
        return f;
    }
    if (f.degenerate) f.note = "Omega reached the rounding floor";
    const auto line = fit_line(xs, ys);
    f.nu_hat = -line.slope;
    f.r_squared = line.r_squared;
    f.eta_hat = Omega.front() > 0.0 ? std::exp(line.intercept) / Omega.front() : 0.0;
    return f;
}

inline DecayFit fit_decay(const AverageRecord& rec, double window = 0.5) {
    std::vector<double> t, om;
    for (const auto& s : rec.samples) {
        t.push_back(s.t);
        om.push_back(s.Omega);
    }
    return fit_decay(t, om, window);
}

/// Decay of the dither-period average of vartheta: fits log|mean| against
/// the period midpoint while the mean stays above `floor_fraction` of its
/// first value. nu_hat is the rate of |vartheta|, not of its square.
inline DecayFit fit_period_averaged_decay(const TrajectoryRecord& rec, double period, double floor_fraction = 1e-3) {
    if (!(period > 0.0)) throw std::invalid_argument("fit_period_averaged_decay: period must be > 0");
    const auto& s = rec.samples;
    std::vector<double> mid, mean;
    if (s.size() < 2) throw std::invalid_argument("fit_period_averaged_decay: need at least 2 samples");
    const double h = s[1].t - s[0].t;
    for (std::size_t i = 0; i < s.size();) {
        const double start = s[i].t;
        if (s.back().t < start + period - h - 1e-12) break;   // incomplete last period
        double sum = 0.0;
        std::size_t j = i;
        for (; j < s.size() && s[j].t < start + period - 1e-12; ++j) sum += s[j].vartheta;
        mid.push_back(start + 0.5 * period);
        mean.push_back(sum / static_cast<double>(j - i));
        i = j;
    }
    DecayFit f;
    if (mean.size() < 3) {
        f.degenerate = true;
        f.note = "fewer than 3 complete periods";
        return f;
    }
    const double first = std::abs(mean.front());
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < mean.size(); ++k) {
        if (std::abs(mean[k]) < floor_fraction * first) break;
        xs.push_back(mid[k]);
        ys.push_back(std::log(std::abs(mean[k])));
    }
    f.points = xs.size();
    f.window_start = mid.front();
    if (xs.size() < 3) {
        f.degenerate = true;
        f.note = "period average fell below the floor within 3 periods";
        return f;
    }
    const auto line = fit_line(xs, ys);
    f.nu_hat = -line.slope;
    f.r_squared = line.r_squared;
    f.eta_hat = std::exp(line.intercept) / first;
    return f;
}

// -----------------------------------------------------------------------------
// Residual scaling
// -----------------------------------------------------------------------------

struct ScalingRun {
    double amplitude = 0.0;
    double omega = 0.0;
    double y_residual = 0.0;       // late-time mean |y - y*|
    double Theta_residual = 0.0;   // late-time mean |Theta - Theta*|
    bool failed = false;
};

struct ScalingReport {
    double omega = 0.0;            // frequency group used for the fit
    std::size_t points = 0;
    double y_exponent = 0.0;
    double y_r_squared = 0.0;
    double Theta_exponent = 0.0;
    double Theta_r_squared = 0.0;
    bool inconclusive = false;
    std::optional<bool> omega_monotone;   // set when some amplitude has runs at several omegas
    std::vector<std::string> notes;
};

inline constexpr double kResidualFloor = 1e-10;

inline ScalingRun scaling_run(const TrajectoryRecord& rec, const ScenarioConfig& cfg, double window) {
    const auto st = late_time_stats(rec, cfg.map, window);
    return {cfg.dither.amplitude, cfg.dither.omega, st.mean_abs_y_error, st.mean_abs_Theta_error, false};
}

/// Fits log residual against log a at the largest omega that has at least
/// three distinct amplitudes; also checks that doubling omega does not
/// increase the residuals (10% slack).
inline ScalingReport residual_scaling(std::span<const ScalingRun> runs, double monotone_slack = 0.10) {
    ScalingReport rep;
    std::map<double, std::vector<ScalingRun>> by_omega;
    for (const auto& r : runs) {
        if (r.failed) {
            rep.notes.push_back("run at a = " + format_double(r.amplitude) + ", omega = " + format_double(r.omega) +
                                " failed and is excluded");
            continue;
        }
        by_omega[r.omega].push_back(r);
    }
    const std::vector<ScalingRun>* group = nullptr;
    for (auto it = by_omega.rbegin(); it != by_omega.rend(); ++it) {
        std::vector<double> amps;
        for (const auto& r : it->second) amps.push_back(r.amplitude);
        std::sort(amps.begin(), amps.end());
        amps.erase(std::unique(amps.begin(), amps.end()), amps.end());
        if (amps.size() >= 3) {
            group = &it->second;
            rep.omega = it->first;
            break;
        }
    }
    if (group == nullptr) {
        rep.inconclusive = true;
        rep.notes.emplace_back("need at least 3 distinct amplitudes at one frequency");
    } else {
        std::vector<double> la, ly, lT;
        for (const auto& r : *group) {
            if (r.y_residual < kResidualFloor || r.Theta_residual < kResidualFloor) {
                rep.inconclusive = true;
                rep.notes.push_back("residual below the solver error floor at a = " + format_double(r.amplitude));
                continue;
            }
            la.push_back(std::log(r.amplitude));
            ly.push_back(std::log(r.y_residual));
            lT.push_back(std::log(r.Theta_residual));
        }
        rep.points = la.size();
        if (la.size() >= 2) {
            const auto fy = fit_line(la, ly);
            const auto fT = fit_line(la, lT);
            rep.y_exponent = fy.slope;
            rep.y_r_squared = fy.r_squared;
            rep.Theta_exponent = fT.slope;
            rep.Theta_r_squared = fT.r_squared;
        }
        if (la.size() < 3) rep.inconclusive = true;
    }

    // omega monotonicity per amplitude
    std::map<double, std::vector<ScalingRun>> by_amp;
    for (const auto& [w, rs] : by_omega) {
        for (const auto& r : rs) by_amp[r.amplitude].push_back(r);
    }
    for (auto& [a, rs] : by_amp) {
        if (rs.size() < 2) continue;
        std::sort(rs.begin(), rs.end(), [](const ScalingRun& l, const ScalingRun& r) { return l.omega < r.omega; });
        bool ok = true;
        for (std::size_t i = 1; i < rs.size(); ++i) {
            if (rs[i].y_residual > (1.0 + monotone_slack) * rs[i - 1].y_residual ||
                rs[i].Theta_residual > (1.0 + monotone_slack) * rs[i - 1].Theta_residual) {
                ok = false;
                rep.notes.push_back("residual grew with omega at a = " + format_double(a));
            }
        }
        rep.omega_monotone = rep.omega_monotone.value_or(true) && ok;
    }
    return rep;
}

// -----------------------------------------------------------------------------
// key: value reports
// -----------------------------------------------------------------------------

class Report {
public:
    void add(const std::string& key, double v) { lines_.emplace_back(key, format_double(v)); }
    void add(const std::string& key, const std::string& v) { lines_.emplace_back(key, v); }
    void add(const std::string& key, const char* v) { lines_.emplace_back(key, v); }
    void add(const std::string& key, bool v) { lines_.emplace_back(key, v ? "true" : "false"); }
    void add(const std::string& key, std::size_t v) { lines_.emplace_back(key, std::to_string(v)); }

    void write(std::ostream& os) const {
        for (const auto& [k, v] : lines_) os << k << ": " << v << '\n';
    }
    [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& lines() const { return lines_; }

private:
    std::vector<std::pair<std::string, std::string>> lines_;
};

}  // namespace esc
