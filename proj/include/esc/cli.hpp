#pragma once

// =============================================================================
// Command-line front end
// =============================================================================
//   esc run --config <file> --out <dir>
//   esc design-dither --a <a> --omega <w> --L <L> [--formula f] [--samples n]
//   esc sweep --config <file> --param {a,omega,K} --values v1,v2,... [--out dir]
//
// Exit codes: 0 success, 1 invalid config or failed run, 2 usage error.
// ESC_THREADS caps the number of concurrent sweep runs.
// =============================================================================

#include "esc/analysis.hpp"
#include "esc/closed_loop.hpp"
#include "esc/config.hpp"
#include "esc/csv.hpp"
#include "esc/dither.hpp"
#include "esc/format.hpp"
#include "esc/manifest.hpp"
#include "esc/svg_plot.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace esc::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

inline constexpr const char* kFailedMarker = ".failed";

struct RunOutputs {
    std::vector<std::string> files;   // relative to the output directory
    Report report;
    std::optional<ScalingRun> scaling;
    std::optional<DecayFit> decay;
};

namespace detail {

class OutputDir {
public:
    explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {}

    std::ofstream open(const std::string& name) {
        std::ofstream os(dir_ / name);
        if (!os) throw std::runtime_error("cannot write '" + (dir_ / name).string() + "'");
        files_.push_back(name);
        return os;
    }
    [[nodiscard]] const std::vector<std::string>& files() const { return files_; }
    [[nodiscard]] const fs::path& path() const { return dir_; }

private:
    fs::path dir_;
    std::vector<std::string> files_;
};

inline void write_marker(const fs::path& dir, const std::string& message) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream os(dir / kFailedMarker);
    os << message << '\n';
}

template <typename Get>
std::vector<double> column(const std::vector<TrajectorySample>& s, Get get) {
    std::vector<double> out;
    out.reserve(s.size());
    for (const auto& v : s) out.push_back(get(v));
    return out;
}

inline void plot_lines(OutputDir& out, const std::string& name, const svg::Axes& ax, const std::vector<double>& t,
                       const std::vector<svg::Series>& series) {
    auto os = out.open(name);
    svg::line_chart(os, ax, t, series);
}

inline void add_warnings(Report& rep, const std::vector<std::string>& warnings) {
    for (std::size_t i = 0; i < warnings.size(); ++i) rep.add("warning_" + std::to_string(i + 1), warnings[i]);
}

inline void run_esc_outputs(const RunConfig& rc, OutputDir& out, RunOutputs& res) {
    const auto& c = rc.scenario;
    const auto rec = run_esc(c);
    const auto design = design_dither(c.dither, c.dither_formula);
    {
        auto os = out.open("trajectory.csv");
        write_trajectory_csv(os, rec);
    }
    if (!rec.snapshots.empty()) {
        auto os = out.open("field.csv");
        write_field_csv(os, rec);
    }
    const double window = std::min(rc.analysis.late_window, c.T_final);
    const auto st = late_time_stats(rec, c.map, window);
    res.scaling = ScalingRun{c.dither.amplitude, c.dither.omega, st.mean_abs_y_error, st.mean_abs_Theta_error, false};

    Report& r = res.report;
    r.add("dither_formula", to_string(c.dither_formula));
    r.add("dither_A", design.A);
    r.add("dither_phi", design.phi);
    r.add("dither_B", design.B);
    r.add("dither_psi", design.psi);
    r.add("S_envelope", design.envelope());
    r.add("K_bar", c.nominal_K_bar());
    r.add("late_window_start", st.window_start);
    r.add("late_samples", st.samples);
    r.add("mean_abs_y_error", st.mean_abs_y_error);
    r.add("max_abs_y_error", st.max_abs_y_error);
    r.add("mean_abs_Theta_error", st.mean_abs_Theta_error);
    r.add("max_abs_Theta_error", st.max_abs_Theta_error);
    r.add("max_abs_theta_error", st.max_abs_theta_error);
    r.add("theta_within_1.5_envelope", st.max_abs_theta_error <= 1.5 * design.envelope());
    r.add("mean_H_hat", st.mean_H_hat);
    r.add("min_H_hat", st.min_H_hat);
    r.add("max_H_hat", st.max_H_hat);
    r.add("final_y", rec.samples.back().y);
    r.add("final_Theta", rec.samples.back().Theta);
    add_warnings(r, rec.warnings);

    const auto t = column(rec.samples, [](const auto& s) { return s.t; });
    const std::vector<double> ystar(t.size(), c.map.y_star);
    const std::vector<double> tstar(t.size(), c.map.theta_star);
    plot_lines(out, "y.svg", {"Output y(t)", "t [s]", "y"}, t,
               {{"y", column(rec.samples, [](const auto& s) { return s.y; })}, {"y*", ystar, "#999999"}});
    plot_lines(out, "U.svg", {"Control U(t)", "t [s]", "U"}, t,
               {{"U", column(rec.samples, [](const auto& s) { return s.U; })}});
    plot_lines(out, "theta.svg", {"Boundary input theta(t) and Theta(t)", "t [s]", "input"}, t,
               {{"theta", column(rec.samples, [](const auto& s) { return s.theta; })},
                {"Theta", column(rec.samples, [](const auto& s) { return s.Theta; }), "#d62728"},
                {"Theta*", tstar, "#999999"}});
    plot_lines(out, "S.svg", {"Dither S(t)", "t [s]", "S"}, t,
               {{"S", column(rec.samples, [](const auto& s) { return s.S; })}});
    if (!rec.snapshots.empty()) {
        std::vector<double> ts;
        std::vector<std::vector<double>> rows;
        for (const auto& snap : rec.snapshots) {
            ts.push_back(snap.t);
            rows.push_back(snap.alpha);
        }
        auto os = out.open("alpha.svg");
        svg::heatmap(os, {"alpha(x, t)", "x [m]", "t [s]"}, ts, rec.grid.nodes(), rows);
    }
}

inline void run_average_outputs(const RunConfig& rc, OutputDir& out, RunOutputs& res) {
    const auto& c = rc.scenario;
    const std::vector<double> u0(c.grid.n, c.initial_u);
    const double K_bar = c.nominal_K_bar();
    const auto gate = check_gain(K_bar, c.grid.length);
    const bool kernel_ok = gate.admissible || K_bar >= 0.0;
    AverageSystemOptions opt;
    opt.keep_profiles = kernel_ok;
    opt.enforce_admissible = !c.allow_inadmissible_gain;
    const auto rec = run_average_system(c, c.initial_vartheta, u0, opt);
    {
        auto os = out.open("average.csv");
        write_average_csv(os, rec);
    }
    const auto fit = fit_decay(rec, rc.analysis.decay_window);
    res.decay = fit;
    Report& r = res.report;
    r.add("K_bar", K_bar);
    r.add("A_cl", K_bar * c.grid.length);
    r.add("gain_admissible", gate.admissible);
    if (!gate.admissible) r.add("gain_reason", gate.reason);
    r.add("decay_window_start", fit.window_start);
    r.add("decay_points", fit.points);
    r.add("nu_hat", fit.nu_hat);
    r.add("eta_hat", fit.eta_hat);
    r.add("r_squared", fit.r_squared);
    r.add("decay_degenerate", fit.degenerate);
    if (!fit.note.empty()) r.add("decay_note", fit.note);
    if (kernel_ok) {
        const BacksteppingKernel kernel(K_bar, c.grid.length);
        const auto tr = target_residuals(rec, kernel);
        r.add("max_Zdot_residual", tr.max_Zdot_residual);
        r.add("max_abs_wL", tr.max_wL);
        r.add("max_heat_residual", tr.max_heat_residual);
        r.add("discretization_scale", tr.discretization_scale);
        r.add("target_inconclusive", tr.inconclusive);
        add_warnings(r, tr.warnings);
    }
    add_warnings(r, rec.warnings);

    std::vector<double> t, logO, vt;
    for (const auto& s : rec.samples) {
        t.push_back(s.t);
        logO.push_back(s.Omega > 0.0 ? std::log10(s.Omega) : std::nan(""));
        vt.push_back(s.vartheta);
    }
    plot_lines(out, "Omega.svg", {"log10 Omega(t)", "t [s]", "log10 Omega"}, t, {{"log10 Omega", logO}});
    plot_lines(out, "vartheta.svg", {"Average error vartheta(t)", "t [s]", "vartheta"}, t, {{"vartheta", vt}});
}

inline void run_standard_outputs(const RunConfig& rc, OutputDir& out, RunOutputs& res) {
    const auto& c = rc.scenario;
    StandardEscOptions opt;
    opt.dt = c.solver.dt;
    opt.theta_hat0 = c.initial_theta_hat;
    opt.washout = c.standard_washout;
    opt.washout_corner = c.estimators.washout_corner;
    opt.hessian_corner = c.estimators.hessian_corner;
    opt.record_every = c.record_every;
    const auto rec = run_standard_esc(c.map, c.dither, c.gains.K, c.T_final, opt);
    {
        auto os = out.open("trajectory.csv");
        write_trajectory_csv(os, rec);
    }
    const double window = std::min(rc.analysis.late_window, c.T_final);
    const auto st = late_time_stats(rec, c.map, window);
    res.scaling = ScalingRun{c.dither.amplitude, c.dither.omega, st.mean_abs_y_error, st.mean_abs_Theta_error, false};
    const auto fit = fit_period_averaged_decay(rec, c.dither.period());
    Report& r = res.report;
    r.add("nominal_rate_K_abs_H", c.gains.K * std::abs(c.map.H));
    r.add("fitted_rate", fit.nu_hat);
    r.add("fitted_rate_r_squared", fit.r_squared);
    r.add("mean_abs_y_error", st.mean_abs_y_error);
    r.add("mean_abs_Theta_error", st.mean_abs_Theta_error);
    r.add("mean_H_hat", st.mean_H_hat);
    add_warnings(r, rec.warnings);
    const auto t = column(rec.samples, [](const auto& s) { return s.t; });
    plot_lines(out, "y.svg", {"Output y(t)", "t [s]", "y"}, t,
               {{"y", column(rec.samples, [](const auto& s) { return s.y; })}});
    plot_lines(out, "theta.svg", {"Input Theta(t)", "t [s]", "Theta"}, t,
               {{"Theta", column(rec.samples, [](const auto& s) { return s.Theta; })}});
}

}  // namespace detail

/// Runs one scenario into out_dir and writes report.txt and manifest.json.
/// Throws on failure; the caller writes the failure marker.
inline RunOutputs execute_run(const RunConfig& rc, const fs::path& out_dir, const std::string& config_path) {
    fs::create_directories(out_dir);
    fs::remove(out_dir / kFailedMarker);
    detail::OutputDir out(out_dir);
    RunOutputs res;
    res.report.add("scenario", rc.scenario.name);
    res.report.add("kind", to_string(rc.scenario.kind));
    switch (rc.scenario.kind) {
        case ScenarioKind::esc: detail::run_esc_outputs(rc, out, res); break;
        case ScenarioKind::average: detail::run_average_outputs(rc, out, res); break;
        case ScenarioKind::standard: detail::run_standard_outputs(rc, out, res); break;
    }
    {
        auto os = out.open("report.txt");
        res.report.write(os);
    }
    res.files = out.files();
    RunManifest m;
    m.scenario = rc.scenario.name;
    m.config_path = config_path;
    m.output_dir = out_dir.string();
    m.collect(res.files);
    m.write(out_dir / "manifest.json");
    return res;
}

inline int cmd_run(const std::string& config_path, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
    RunConfig rc;
    try {
        rc = load_config(config_path);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "invalid config '" << config_path << "': " << e.what() << '\n';
        return kFailure;
    }
    try {
        const auto res = execute_run(rc, out_dir, config_path);
        res.report.write(out);
        out << "wrote " << res.files.size() << " files to " << out_dir.string() << '\n';
        return kOk;
    } catch (const std::exception& e) {
        detail::write_marker(out_dir, e.what());
        err << "run failed: " << e.what() << '\n';
        return kFailure;
    }
}

inline int cmd_design_dither(double a, double omega, double L, const std::string& formula_name, std::size_t samples,
                             std::ostream& out, std::ostream& err) {
    if (!(a > 0.0) || !(omega > 0.0) || !(L > 0.0) || !std::isfinite(a) || !std::isfinite(omega) || !std::isfinite(L)) {
        err << "usage error: --a, --omega and --L must be positive\n";
        return kUsage;
    }
    if (samples == 0) {
        err << "usage error: --samples must be positive\n";
        return kUsage;
    }
    DitherFormula formula;
    try {
        formula = parse_dither_formula(formula_name);
    } catch (const std::exception& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    }
    const DitherParams p{a, omega, L};
    const auto d = design_dither(p, formula);
    const auto other = design_dither(p, formula == DitherFormula::consistent ? DitherFormula::published
                                                                             : DitherFormula::consistent);
    Report r;
    r.add("formula", to_string(formula));
    r.add("A", d.A);
    r.add("phi", d.phi);
    r.add("B", d.B);
    r.add("psi", d.psi);
    r.add("envelope", d.envelope());
    r.add(std::string("other_formula"), to_string(other.formula));
    r.add("other_A", other.A);
    r.add("other_phi", other.phi);
    const auto ts = one_period_samples(p, samples);
    const auto rep = verify_integral_identity(d, ts, 1e-6);
    r.add("identity_max_residual", rep.max_residual);
    r.write(out);
    out << "t,S,a_sin_wt,int_beta\n";
    const auto rule = gauss_legendre_rule(64);
    for (double t : ts) {
        out << format_double(t) << ',' << format_double(dither_S(d, t)) << ','
            << format_double(a * std::sin(omega * t)) << ',' << format_double(beta_integral(d, t, rule)) << '\n';
    }
    return kOk;
}

enum class SweepParam { a, omega, K };

inline SweepParam parse_sweep_param(const std::string& s) {
    if (s == "a") return SweepParam::a;
    if (s == "omega") return SweepParam::omega;
    if (s == "K") return SweepParam::K;
    throw std::invalid_argument("unknown sweep parameter '" + s + "' (expected a|omega|K)");
}

inline void apply_sweep_value(ScenarioConfig& c, SweepParam p, double v) {
    switch (p) {
        case SweepParam::a: c.dither.amplitude = v; break;
        case SweepParam::omega: c.dither.omega = v; break;
        case SweepParam::K:
            c.gains.K = v;
            c.gains.K_bar = v * c.map.H;
            break;
    }
}

inline unsigned sweep_threads(std::size_t jobs) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ESC_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) throw UsageError("ESC_THREADS must be a positive integer");
        n = static_cast<unsigned>(v);
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, jobs)));
}

struct SweepEntry {
    double value = 0.0;
    std::string dir;
    bool ok = false;
    std::string error;
    RunOutputs outputs;
};

inline int cmd_sweep(const std::string& config_path, const std::string& param_name, const std::vector<double>& values,
                     const fs::path& out_dir, std::ostream& out, std::ostream& err) {
    SweepParam param;
    RunConfig base;
    unsigned threads = 1;
    try {
        param = parse_sweep_param(param_name);
        if (values.empty()) throw UsageError("--values needs at least one value");
        base = load_config(config_path);
        threads = sweep_threads(values.size());
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "invalid config '" << config_path << "': " << e.what() << '\n';
        return kFailure;
    }

    std::vector<SweepEntry> entries(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        entries[i].value = values[i];
        entries[i].dir = param_name + "_" + format_double(values[i]);
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < entries.size(); i = next++) {
            auto& e = entries[i];
            const fs::path dir = out_dir / e.dir;
            try {
                RunConfig rc = base;
                apply_sweep_value(rc.scenario, param, e.value);
                rc.scenario.name = base.scenario.name + "/" + e.dir;
                try {
                    validate_for_kind(rc.scenario);
                } catch (const std::invalid_argument& ex) {
                    throw ConfigError(ex.what());
                }
                e.outputs = execute_run(rc, dir, config_path);
                e.ok = true;
            } catch (const std::exception& ex) {
                e.error = ex.what();
                detail::write_marker(dir, e.error);
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    }

    Report summary;
    summary.add("scenario", base.scenario.name);
    summary.add("parameter", param_name);
    summary.add("runs", values.size());
    std::size_t failed = 0;
    std::vector<ScalingRun> scaling;
    for (const auto& e : entries) {
        const std::string key = "run_" + e.dir;
        if (!e.ok) {
            ++failed;
            summary.add(key, "FAILED: " + e.error);
            continue;
        }
        if (e.outputs.scaling) {
            scaling.push_back(*e.outputs.scaling);
            summary.add(key, "ok mean_abs_y_error=" + format_double(e.outputs.scaling->y_residual) +
                                 " mean_abs_Theta_error=" + format_double(e.outputs.scaling->Theta_residual));
        } else if (e.outputs.decay) {
            summary.add(key, "ok nu_hat=" + format_double(e.outputs.decay->nu_hat) +
                                 " r_squared=" + format_double(e.outputs.decay->r_squared));
        } else {
            summary.add(key, "ok");
        }
    }
    summary.add("failed_runs", failed);
    if (param != SweepParam::K && base.scenario.kind != ScenarioKind::average) {
        const auto rep = residual_scaling(scaling);
        summary.add("scaling_inconclusive", rep.inconclusive);
        summary.add("scaling_points", rep.points);
        if (rep.points >= 2) {
            summary.add("scaling_omega", rep.omega);
            summary.add("y_exponent", rep.y_exponent);
            summary.add("y_r_squared", rep.y_r_squared);
            summary.add("Theta_exponent", rep.Theta_exponent);
            summary.add("Theta_r_squared", rep.Theta_r_squared);
        }
        if (rep.omega_monotone) summary.add("omega_monotone", *rep.omega_monotone);
        for (std::size_t i = 0; i < rep.notes.size(); ++i) summary.add("note_" + std::to_string(i + 1), rep.notes[i]);
    }
    try {
        fs::create_directories(out_dir);
        std::ofstream os(out_dir / "sweep_report.txt");
        summary.write(os);
    } catch (const std::exception& e) {
        err << "cannot write sweep report: " << e.what() << '\n';
        return kFailure;
    }
    summary.write(out);
    return failed == 0 ? kOk : kFailure;
}

/// Parses argv and dispatches to a subcommand.
inline int main_entry(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Extremum seeking through a distributed diffusion actuator"};
    app.require_subcommand(1);

    std::string config, out_dir;
    auto* run = app.add_subcommand("run", "run a scenario from a config file");
    run->add_option("--config", config, "scenario config (INI)")->required();
    run->add_option("--out", out_dir, "output directory")->required();

    double a = 0, omega = 0, L = 0;
    std::string formula = "consistent";
    std::size_t samples = 64;
    auto* dd = app.add_subcommand("design-dither", "print dither constants and one period of S(t)");
    dd->add_option("--a", a, "dither amplitude")->required();
    dd->add_option("--omega", omega, "dither frequency [rad/s]")->required();
    dd->add_option("--L", L, "domain length")->required();
    dd->add_option("--formula", formula, "consistent | published");
    dd->add_option("--samples", samples, "table rows over one period");

    std::string param;
    std::vector<double> values;
    std::string sweep_out = "sweep_out";
    auto* sw = app.add_subcommand("sweep", "run one scenario per parameter value");
    sw->add_option("--config", config, "base scenario config (INI)")->required();
    sw->add_option("--param", param, "a | omega | K")->required();
    sw->add_option("--values", values, "comma-separated values")->required()->delimiter(',');
    sw->add_option("--out", sweep_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return kUsage;
    }
    if (run->parsed()) return cmd_run(config, out_dir, out, err);
    if (dd->parsed()) return cmd_design_dither(a, omega, L, formula, samples, out, err);
    return cmd_sweep(config, param, values, sweep_out, out, err);
}

}  // namespace esc::cli
