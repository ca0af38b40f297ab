#pragma once

// Scenario configuration files: INI sections of key = value lines,
// ';' starts a comment. Every key is optional; missing keys keep the
// numerical-experiment defaults of ScenarioConfig::paper().
//
//   [scenario]   name, kind (esc | average | standard)
//   [map]        y_star, theta_star, H
//   [dither]     a, omega, formula (consistent | published)
//   [controller] K, K_bar, c, allow_unstable   K_bar alone sets K = K_bar / H;
//                allow_unstable lets average runs use an inadmissible Kbar
//   [estimator]  washout_corner, hessian_corner, hessian_input (washed | raw)
//   [domain]     L, n, diffusion
//   [solver]     dt, scheme, T_final
//   [initial]    theta_hat, alpha, vartheta, u
//   [output]     record_every, snapshot_every
//   [analysis]   late_window, decay_window
//   [standard]   washout (true | false)

#include "esc/closed_loop.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace esc {

/// Malformed invocation: missing or empty config file.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parsed but invalid configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AnalysisConfig {
    double late_window = 20.0;   // seconds, late-time statistics
    double decay_window = 0.5;   // trailing fraction for the decay fit
};

struct RunConfig {
    ScenarioConfig scenario = ScenarioConfig::paper();
    AnalysisConfig analysis;
};

namespace detail {

inline const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"scenario", {"name", "kind"}},
        {"map", {"y_star", "theta_star", "H"}},
        {"dither", {"a", "omega", "formula"}},
        {"controller", {"K", "K_bar", "c", "allow_unstable"}},
        {"estimator", {"washout_corner", "hessian_corner", "hessian_input"}},
        {"domain", {"L", "n", "diffusion"}},
        {"solver", {"dt", "scheme", "T_final"}},
        {"initial", {"theta_hat", "alpha", "vartheta", "u"}},
        {"output", {"record_every", "snapshot_every"}},
        {"analysis", {"late_window", "decay_window"}},
        {"standard", {"washout"}},
    };
    return keys;
}

inline double parse_real(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError(key + ": '" + text + "' is not a number");
    }
    if (used != text.size()) throw ConfigError(key + ": '" + text + "' is not a number");
    if (!std::isfinite(v)) throw ConfigError(key + ": value must be finite");
    return v;
}

inline std::size_t parse_count(const std::string& key, const std::string& text) {
    const double v = parse_real(key, text);
    if (v < 0.0 || v != std::floor(v)) throw ConfigError(key + ": '" + text + "' is not a non-negative integer");
    return static_cast<std::size_t>(v);
}

inline bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(key + ": '" + text + "' is not a boolean");
}

}  // namespace detail

/// Kind-specific validation; throws std::invalid_argument.
inline void validate_for_kind(const ScenarioConfig& c) {
    switch (c.kind) {
        case ScenarioKind::esc: c.validate_esc(); break;
        case ScenarioKind::average: {
            c.validate();
            if (!c.allow_inadmissible_gain) {
                const auto check = check_gain(c.nominal_K_bar(), c.grid.length);
                if (!check.admissible) throw std::invalid_argument("inadmissible gain: " + check.reason);
            }
            break;
        }
        case ScenarioKind::standard:
            c.validate();
            if (c.gains.K < 0.0) throw std::invalid_argument("adaptation gain K must be >= 0");
            if (c.dither.amplitude < kMinDitherAmplitude) throw std::invalid_argument("dither amplitude a must be > 0");
            break;
    }
}

/// Parses INI text. Throws UsageError for empty input, ConfigError for
/// unknown keys, malformed values or an invalid resulting scenario.
inline RunConfig parse_config(const std::string& text) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw UsageError("config is empty");
    boost::property_tree::ptree pt;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }

    std::map<std::string, std::string> kv;
    for (const auto& [section, body] : pt) {
        const auto it = detail::known_keys().find(section);
        if (it == detail::known_keys().end()) {
            if (!body.data().empty()) throw ConfigError("key '" + section + "' outside a section");
            throw ConfigError("unknown section [" + section + "]");
        }
        for (const auto& [key, value] : body) {
            if (!it->second.contains(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
            kv[section + "." + key] = value.data();
        }
    }
    auto has = [&](const std::string& k) { return kv.contains(k); };
    auto real = [&](const std::string& k, double& out) {
        if (has(k)) out = detail::parse_real(k, kv.at(k));
    };
    auto count = [&](const std::string& k, std::size_t& out) {
        if (has(k)) out = detail::parse_count(k, kv.at(k));
    };

    RunConfig rc;
    ScenarioConfig& c = rc.scenario;
    try {
        if (has("scenario.name")) c.name = kv.at("scenario.name");
        if (has("scenario.kind")) c.kind = parse_scenario_kind(kv.at("scenario.kind"));
        real("map.y_star", c.map.y_star);
        real("map.theta_star", c.map.theta_star);
        real("map.H", c.map.H);
        real("dither.a", c.dither.amplitude);
        real("dither.omega", c.dither.omega);
        if (has("dither.formula")) c.dither_formula = parse_dither_formula(kv.at("dither.formula"));
        real("controller.c", c.gains.c);
        real("estimator.washout_corner", c.estimators.washout_corner);
        real("estimator.hessian_corner", c.estimators.hessian_corner);
        if (has("estimator.hessian_input")) {
            const auto& v = kv.at("estimator.hessian_input");
            if (v == "washed") c.estimators.hessian_input = HessianInput::washed;
            else if (v == "raw") c.estimators.hessian_input = HessianInput::raw;
            else throw ConfigError("estimator.hessian_input: expected washed|raw, got '" + v + "'");
        }
        real("domain.L", c.grid.length);
        count("domain.n", c.grid.n);
        real("domain.diffusion", c.diffusion);
        c.dither.length = c.grid.length;
        real("solver.dt", c.solver.dt);
        if (has("solver.scheme")) c.solver.scheme = parse_scheme(kv.at("solver.scheme"));
        real("solver.T_final", c.T_final);
        real("initial.theta_hat", c.initial_theta_hat);
        real("initial.vartheta", c.initial_vartheta);
        real("initial.u", c.initial_u);
        count("output.record_every", c.record_every);
        count("output.snapshot_every", c.snapshot_every);
        real("analysis.late_window", rc.analysis.late_window);
        real("analysis.decay_window", rc.analysis.decay_window);
        if (has("controller.allow_unstable")) {
            c.allow_inadmissible_gain = detail::parse_bool("controller.allow_unstable", kv.at("controller.allow_unstable"));
        }
        if (has("standard.washout")) c.standard_washout = detail::parse_bool("standard.washout", kv.at("standard.washout"));

        // K and K_bar = K H
        const bool has_K = has("controller.K");
        const bool has_Kbar = has("controller.K_bar");
        real("controller.K", c.gains.K);
        if (has_Kbar) {
            const double K_bar = detail::parse_real("controller.K_bar", kv.at("controller.K_bar"));
            if (has_K && std::abs(c.gains.K * c.map.H - K_bar) > 1e-12 * std::max(1.0, std::abs(K_bar))) {
                throw ConfigError("controller.K_bar = " + kv.at("controller.K_bar") + " disagrees with K * H = " +
                                  std::to_string(c.gains.K * c.map.H));
            }
            if (!has_K) c.gains.K = K_bar / c.map.H;
        }
        c.gains.K_bar = c.gains.K * c.map.H;

        if (has("initial.alpha")) {
            const double a0 = detail::parse_real("initial.alpha", kv.at("initial.alpha"));
            c.initial_alpha.assign(c.grid.n, a0);
        }
        if (!(rc.analysis.late_window > 0.0)) throw ConfigError("analysis.late_window must be > 0");
        if (!(rc.analysis.decay_window > 0.0 && rc.analysis.decay_window <= 1.0)) {
            throw ConfigError("analysis.decay_window must be in (0, 1]");
        }

        validate_for_kind(c);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return rc;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace esc
