#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemo/expr.hpp"
#include "chemo/grid.hpp"
#include "chemo/model.hpp"

namespace chemo {

/// Parse or validation failure with the offending line (0 when not tied to
/// a specific line).
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& msg)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_ = 0;
};

struct ConfigEntry {
    std::string key;
    std::string value;  // raw text, quotes stripped
    int line = 0;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline double parse_double(const ConfigEntry& e) {
    const char* s = e.value.c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end == s || *end != '\0')
        throw ConfigError(e.line, "expected a number for '" + e.key + "', got '" + e.value + "'");
    return v;
}

inline long parse_long(const ConfigEntry& e) {
    const char* s = e.value.c_str();
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end == s || *end != '\0')
        throw ConfigError(e.line, "expected an integer for '" + e.key + "', got '" + e.value + "'");
    return v;
}

inline bool parse_bool(const ConfigEntry& e) {
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    throw ConfigError(e.line, "expected true/false for '" + e.key + "', got '" + e.value + "'");
}

}  // namespace detail

/**
 * Reads a flat `key = value` file: one assignment per line, `#` comments,
 * values either bare tokens or double-quoted strings. Reports duplicate keys
 * and syntax problems with their line numbers.
 */
inline std::vector<ConfigEntry> parse_kv_text(const std::string& text) {
    std::vector<ConfigEntry> entries;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        // Strip comments, respecting quoted values.
        bool quoted = false;
        std::string line;
        for (char ch : raw) {
            if (ch == '"') quoted = !quoted;
            if (ch == '#' && !quoted) break;
            line += ch;
        }
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(lineno, "expected 'key = value', got '" + detail::trim(raw) + "'");
        ConfigEntry e;
        e.key = detail::trim(line.substr(0, eq));
        e.value = detail::trim(line.substr(eq + 1));
        e.line = lineno;
        if (e.key.empty()) throw ConfigError(lineno, "missing key before '='");
        if (e.value.empty()) throw ConfigError(lineno, "missing value for '" + e.key + "'");
        if (e.value.size() >= 2 && e.value.front() == '"') {
            if (e.value.back() != '"') throw ConfigError(lineno, "unterminated string value");
            e.value = e.value.substr(1, e.value.size() - 2);
        }
        for (const auto& prev : entries)
            if (prev.key == e.key)
                throw ConfigError(lineno, "duplicate key '" + e.key + "' (first on line " +
                                              std::to_string(prev.line) + ")");
        entries.push_back(std::move(e));
    }
    return entries;
}

inline std::vector<ConfigEntry> parse_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_kv_text(ss.str());
}

enum class GridMode { radial, polar };

enum class U0Kind { constant, bump, ring, two_bumps, noisy_bump, expression };

struct U0Spec {
    U0Kind kind = U0Kind::bump;
    double amplitude = 1.0;
    double sigma = 0.3;
    std::string expr_text;  // for U0Kind::expression
};

/// Complete description of one simulation run. parse() applies defaults,
/// then validates ranges; hashing works off the canonical text form.
struct RunConfig {
    ExponentSet exponents;
    double mu1 = 1.0;
    std::string kappa_text = "0";
    std::string mu_text = "1";
    GridMode mode = GridMode::radial;
    double R = 1.0;
    int cells = 200;
    int cells_theta = 64;
    U0Spec u0;
    double t_end = 10.0;
    double dt_init = 1e-3;
    double dt_min = 1e-10;
    double dt_max = 0.1;
    double sample_interval = 0.1;
    double solver_tol = 1e-10;
    double blowup_factor = 1e6;
    bool force_inadmissible = false;
    std::uint64_t seed = 0;

    RadialFn kappa_fn() const { return RadialFn::parse(kappa_text); }
    RadialFn mu_fn() const { return RadialFn::parse(mu_text); }

    CoefficientSpec coefficient_spec() const {
        CoefficientSpec cs;
        cs.kappa = kappa_fn();
        cs.mu = mu_fn();
        cs.mu1 = mu1;
        cs.R = R;
        return cs;
    }

    static RunConfig from_entries(const std::vector<ConfigEntry>& entries,
                                  bool ignore_sweep_keys = false);
    static RunConfig parse_text(const std::string& text) {
        return from_entries(parse_kv_text(text));
    }
    static RunConfig parse_file(const std::string& path) {
        return from_entries(parse_kv_file(path));
    }

    void validate() const {
        if (exponents.n < 2) throw ConfigError(0, "n must be >= 2");
        if (!(mu1 > 0.0)) throw ConfigError(0, "mu1 must be positive");
        if (!(R > 0.0)) throw ConfigError(0, "R must be positive");
        if (cells < 2) throw ConfigError(0, "cells must be >= 2");
        if (mode == GridMode::polar) {
            if (exponents.n != 2) throw ConfigError(0, "polar grid requires n = 2");
            if (cells_theta < 8) throw ConfigError(0, "cells_theta must be >= 8");
        }
        if (!(t_end > 0.0)) throw ConfigError(0, "t_end must be positive");
        if (!(dt_min > 0.0) || !(dt_init >= dt_min) || !(dt_max >= dt_init))
            throw ConfigError(0, "need 0 < dt_min <= dt_init <= dt_max");
        if (!(sample_interval > 0.0)) throw ConfigError(0, "sample_interval must be positive");
        if (!(solver_tol > 0.0)) throw ConfigError(0, "solver_tol must be positive");
        if (!(blowup_factor > 1.0)) throw ConfigError(0, "blowup_factor must exceed 1");
        if (!(u0.sigma > 0.0)) throw ConfigError(0, "u0_sigma must be positive");
        if (u0.amplitude < 0.0) throw ConfigError(0, "u0_amplitude must be nonnegative");
        if (u0.kind == U0Kind::two_bumps && mode != GridMode::polar)
            throw ConfigError(0, "u0 profile 'two_bumps' requires the polar grid");
        // Expressions must at least parse; evaluation errors surface later.
        (void)kappa_fn();
        (void)mu_fn();
        if (u0.kind == U0Kind::expression) (void)RadialFn::parse(u0.expr_text);
    }
};

inline const char* to_string(GridMode m) { return m == GridMode::radial ? "radial" : "polar"; }

inline const char* to_string(U0Kind k) {
    switch (k) {
        case U0Kind::constant: return "constant";
        case U0Kind::bump: return "bump";
        case U0Kind::ring: return "ring";
        case U0Kind::two_bumps: return "two_bumps";
        case U0Kind::noisy_bump: return "noisy_bump";
        case U0Kind::expression: return "expression";
    }
    return "?";
}

inline RunConfig RunConfig::from_entries(const std::vector<ConfigEntry>& entries,
                                         bool ignore_sweep_keys) {
    RunConfig cfg;
    for (const auto& e : entries) {
        if (ignore_sweep_keys && e.key.rfind("sweep_", 0) == 0) continue;
        if (e.key == "n") cfg.exponents.n = static_cast<int>(detail::parse_long(e));
        else if (e.key == "gamma") cfg.exponents.gamma = detail::parse_double(e);
        else if (e.key == "p") cfg.exponents.p = detail::parse_double(e);
        else if (e.key == "q") cfg.exponents.q = detail::parse_double(e);
        else if (e.key == "alpha") cfg.exponents.alpha = detail::parse_double(e);
        else if (e.key == "mu1") cfg.mu1 = detail::parse_double(e);
        else if (e.key == "kappa") cfg.kappa_text = e.value;
        else if (e.key == "mu") cfg.mu_text = e.value;
        else if (e.key == "grid") {
            if (e.value == "radial") cfg.mode = GridMode::radial;
            else if (e.value == "polar") cfg.mode = GridMode::polar;
            else throw ConfigError(e.line, "grid must be 'radial' or 'polar'");
        } else if (e.key == "R") cfg.R = detail::parse_double(e);
        else if (e.key == "cells") cfg.cells = static_cast<int>(detail::parse_long(e));
        else if (e.key == "cells_theta") cfg.cells_theta = static_cast<int>(detail::parse_long(e));
        else if (e.key == "u0") {
            if (e.value == "constant") cfg.u0.kind = U0Kind::constant;
            else if (e.value == "bump") cfg.u0.kind = U0Kind::bump;
            else if (e.value == "ring") cfg.u0.kind = U0Kind::ring;
            else if (e.value == "two_bumps") cfg.u0.kind = U0Kind::two_bumps;
            else if (e.value == "noisy_bump") cfg.u0.kind = U0Kind::noisy_bump;
            else if (e.value.rfind("expr:", 0) == 0) {
                cfg.u0.kind = U0Kind::expression;
                cfg.u0.expr_text = detail::trim(e.value.substr(5));
            } else
                throw ConfigError(e.line,
                                  "u0 must be constant|bump|ring|two_bumps|noisy_bump|expr:<f(s)>");
        } else if (e.key == "u0_amplitude") cfg.u0.amplitude = detail::parse_double(e);
        else if (e.key == "u0_sigma") cfg.u0.sigma = detail::parse_double(e);
        else if (e.key == "t_end") cfg.t_end = detail::parse_double(e);
        else if (e.key == "dt_init") cfg.dt_init = detail::parse_double(e);
        else if (e.key == "dt_min") cfg.dt_min = detail::parse_double(e);
        else if (e.key == "dt_max") cfg.dt_max = detail::parse_double(e);
        else if (e.key == "sample_interval") cfg.sample_interval = detail::parse_double(e);
        else if (e.key == "solver_tol") cfg.solver_tol = detail::parse_double(e);
        else if (e.key == "blowup_factor") cfg.blowup_factor = detail::parse_double(e);
        else if (e.key == "force_inadmissible") cfg.force_inadmissible = detail::parse_bool(e);
        else if (e.key == "seed") cfg.seed = static_cast<std::uint64_t>(detail::parse_long(e));
        else
            throw ConfigError(e.line, "unknown key '" + e.key + "'");
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(0, ex.what());
    }
    return cfg;
}

/// Canonical text form: every effective setting, one per line, sorted by
/// key, floats printed with 17 significant digits. Two configs that differ
/// only in key order or in spelled-out defaults canonicalize identically.
inline std::string canonical_config(const RunConfig& cfg) {
    std::map<std::string, std::string> kv;
    char buf[64];
    auto put_f = [&](const char* k, double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        kv[k] = buf;
    };
    kv["n"] = std::to_string(cfg.exponents.n);
    put_f("gamma", cfg.exponents.gamma);
    put_f("p", cfg.exponents.p);
    put_f("q", cfg.exponents.q);
    put_f("alpha", cfg.exponents.alpha);
    put_f("mu1", cfg.mu1);
    kv["kappa"] = cfg.kappa_fn().str();
    kv["mu"] = cfg.mu_fn().str();
    kv["grid"] = to_string(cfg.mode);
    put_f("R", cfg.R);
    kv["cells"] = std::to_string(cfg.cells);
    if (cfg.mode == GridMode::polar) kv["cells_theta"] = std::to_string(cfg.cells_theta);
    kv["u0"] = (cfg.u0.kind == U0Kind::expression) ? "expr:" + cfg.u0.expr_text
                                                   : to_string(cfg.u0.kind);
    put_f("u0_amplitude", cfg.u0.amplitude);
    put_f("u0_sigma", cfg.u0.sigma);
    put_f("t_end", cfg.t_end);
    put_f("dt_init", cfg.dt_init);
    put_f("dt_min", cfg.dt_min);
    put_f("dt_max", cfg.dt_max);
    put_f("sample_interval", cfg.sample_interval);
    put_f("solver_tol", cfg.solver_tol);
    put_f("blowup_factor", cfg.blowup_factor);
    kv["force_inadmissible"] = cfg.force_inadmissible ? "true" : "false";
    kv["seed"] = std::to_string(cfg.seed);
    std::string out;
    for (const auto& [k, v] : kv) {
        out += k;
        out += " = ";
        out += v;
        out += "\n";
    }
    return out;
}

/// FNV-1a 64-bit over the canonical form; stable across platforms, unlike
/// std::hash.
inline std::string config_hash(const RunConfig& cfg) {
    const std::string text = canonical_config(cfg);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Initial density at the radial cell centers. Throws std::domain_error if
/// the profile evaluates negative anywhere.
inline std::vector<double> sample_u0(const RunConfig& cfg, const RadialGrid& g) {
    std::vector<double> u(g.cells);
    RadialFn expr;
    if (cfg.u0.kind == U0Kind::expression) expr = RadialFn::parse(cfg.u0.expr_text);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> jitter(-0.01, 0.01);
    const double s2 = cfg.u0.sigma * cfg.u0.sigma;
    for (int i = 0; i < g.cells; ++i) {
        const double r = g.nodes[i];
        double v = 0.0;
        switch (cfg.u0.kind) {
            case U0Kind::constant: v = cfg.u0.amplitude; break;
            case U0Kind::bump: v = cfg.u0.amplitude * std::exp(-0.5 * r * r / s2); break;
            case U0Kind::noisy_bump:
                v = cfg.u0.amplitude * std::exp(-0.5 * r * r / s2) * (1.0 + jitter(rng));
                break;
            case U0Kind::ring: {
                const double d = r - 0.5 * g.R;
                v = cfg.u0.amplitude * std::exp(-0.5 * d * d / s2);
                break;
            }
            case U0Kind::expression: v = expr(r); break;
            case U0Kind::two_bumps:
                throw std::domain_error("sample_u0: 'two_bumps' needs the polar grid");
        }
        if (v < 0.0)
            throw std::domain_error("sample_u0: negative initial density at node " +
                                    std::to_string(i));
        u[i] = v;
    }
    return u;
}

/// Initial density on the polar grid. Radial profiles are evaluated at the
/// radial center only, so they stay exactly angle-independent.
inline std::vector<double> sample_u0(const RunConfig& cfg, const PolarGrid& g) {
    std::vector<double> u(g.size());
    RadialFn expr;
    if (cfg.u0.kind == U0Kind::expression) expr = RadialFn::parse(cfg.u0.expr_text);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> jitter(-0.01, 0.01);
    const double s2 = cfg.u0.sigma * cfg.u0.sigma;
    for (int i = 0; i < g.cells_r; ++i) {
        const double r = g.nodes_r[i];
        double radial = 0.0;
        bool per_angle = false;
        switch (cfg.u0.kind) {
            case U0Kind::constant: radial = cfg.u0.amplitude; break;
            case U0Kind::bump: radial = cfg.u0.amplitude * std::exp(-0.5 * r * r / s2); break;
            case U0Kind::noisy_bump:
                radial = cfg.u0.amplitude * std::exp(-0.5 * r * r / s2) * (1.0 + jitter(rng));
                break;
            case U0Kind::ring: {
                const double d = r - 0.5 * g.R;
                radial = cfg.u0.amplitude * std::exp(-0.5 * d * d / s2);
                break;
            }
            case U0Kind::expression: radial = expr(r); break;
            case U0Kind::two_bumps: per_angle = true; break;
        }
        for (int j = 0; j < g.cells_theta; ++j) {
            double v = radial;
            if (per_angle) {
                const double x = r * std::cos(g.theta[j]);
                const double y = r * std::sin(g.theta[j]);
                const double cx = 0.5 * g.R;
                const double d1 = (x - cx) * (x - cx) + y * y;
                const double d2 = (x + cx) * (x + cx) + y * y;
                v = cfg.u0.amplitude *
                    (std::exp(-0.5 * d1 / s2) + std::exp(-0.5 * d2 / s2));
            }
            if (v < 0.0)
                throw std::domain_error("sample_u0: negative initial density at cell (" +
                                        std::to_string(i) + "," + std::to_string(j) + ")");
            u[g.index(i, j)] = v;
        }
    }
    return u;
}

}  // namespace chemo
