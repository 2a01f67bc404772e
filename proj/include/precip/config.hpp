#pragma once

#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "precip/bundle.hpp"
#include "precip/errors.hpp"
#include "precip/grid.hpp"
#include "precip/kinetics.hpp"
#include "precip/nominal.hpp"
#include "precip/solver.hpp"
#include "precip/uncertainty.hpp"

namespace precip {

// Fully resolved run parameters.  Parsed from sectioned key-value text
// ([grid], [kinetics], [objective], [admissible], [uncertainty], [nominal],
// [bundle], [output]); every key is optional and falls back to the defaults
// below, unknown keys are rejected.
struct RunConfig {
    double T = 10.0;
    std::size_t n_t = 100;
    KineticsParams kinetics;
    ObjectiveSpec objective;
    double lower = 0.0;
    double budget = 30.0;     // V_tot; upper defaults to 3*V_tot/T
    double upper = 9.0;
    double u_l = 0.9;
    double u_u = 1.1;
    NominalConfig nominal;
    BundleConfig bundle;
    std::string output_dir = "out";
};

inline TimeGrid time_grid(const RunConfig& cfg) {
    return make_uniform_grid(cfg.T, cfg.n_t);
}

inline AdmissibleSet admissible_set(const RunConfig& cfg) {
    if (cfg.lower < 0.0)
        throw InfeasibleSet("dosing rate bound l must be nonnegative, got " +
                            std::to_string(cfg.lower));
    AdmissibleSet set;
    set.grid = time_grid(cfg);
    set.lower = cfg.lower;
    set.upper = cfg.upper;
    set.budget = cfg.budget;
    validate(set);
    return set;
}

inline UncertaintySet uncertainty_set(const RunConfig& cfg) {
    UncertaintySet u;
    u.u_l = cfg.u_l;
    u.u_u = cfg.u_u;
    u.n = cfg.n_t;
    validate(u);
    return u;
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// strips a # comment that is not inside a quoted string
inline std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"')
            quoted = !quoted;
        else if (s[i] == '#' && !quoted)
            return s.substr(0, i);
    }
    return s;
}

struct ConfigCursor {
    std::string file;
    int line = 0;
    std::string section;

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError(file + ":" + std::to_string(line) + ": " + what +
                          (section.empty() ? "" : " in [" + section + "]"));
    }
};

inline double parse_double(const std::string& text, const ConfigCursor& at) {
    const std::string t = trim(text);
    if (t.empty())
        at.fail("missing numeric value");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        at.fail("malformed number '" + t + "'");
    return v;
}

inline std::size_t parse_count(const std::string& text,
                               const ConfigCursor& at) {
    const double v = parse_double(text, at);
    if (v < 0.0 || v != static_cast<double>(static_cast<std::size_t>(v)))
        at.fail("expected a nonnegative integer, got '" + trim(text) + "'");
    return static_cast<std::size_t>(v);
}

inline std::string parse_string(const std::string& text,
                                const ConfigCursor& at) {
    const std::string t = trim(text);
    if (t.size() < 2 || t.front() != '"' || t.back() != '"')
        at.fail("expected a quoted string, got '" + t + "'");
    return t.substr(1, t.size() - 2);
}

} // namespace detail

inline RunConfig parse_config(std::istream& in, const std::string& name) {
    RunConfig cfg;
    std::optional<double> upper;

    detail::ConfigCursor at;
    at.file = name;

    using Setter = std::function<void(const std::string&,
                                      const detail::ConfigCursor&)>;
    std::map<std::string, std::map<std::string, Setter>> schema;

    auto num = [&](double& slot) {
        return Setter([&slot](const std::string& v,
                              const detail::ConfigCursor& c) {
            slot = detail::parse_double(v, c);
        });
    };
    auto count = [&](std::size_t& slot) {
        return Setter([&slot](const std::string& v,
                              const detail::ConfigCursor& c) {
            slot = detail::parse_count(v, c);
        });
    };
    auto opt = [&](std::optional<double>& slot) {
        return Setter([&slot](const std::string& v,
                              const detail::ConfigCursor& c) {
            slot = detail::parse_double(v, c);
        });
    };

    schema["grid"] = {{"T", num(cfg.T)}, {"N_t", count(cfg.n_t)}};
    schema["kinetics"] = {
        {"k_r", num(cfg.kinetics.k_r)},
        {"beta", num(cfg.kinetics.beta)},
        {"x_n", num(cfg.kinetics.x_n)},
        {"rho", num(cfg.kinetics.rho)},
        {"volume", num(cfg.kinetics.volume)},
        {"c_sat", num(cfg.kinetics.c_sat)},
        {"k_n", num(cfg.kinetics.k_n)},
        {"barrier", num(cfg.kinetics.barrier)},
        {"k_g", num(cfg.kinetics.k_g)},
        {"gamma1", opt(cfg.kinetics.gamma1_override)},
        {"gamma2", opt(cfg.kinetics.gamma2_override)},
        {"eps_s", opt(cfg.kinetics.eps_s_override)},
    };
    schema["objective"] = {
        {"omega1", num(cfg.objective.weight_mean)},
        {"omega2", num(cfg.objective.weight_var)},
        {"target_mean", num(cfg.objective.target_mean)},
    };
    schema["admissible"] = {
        {"l", num(cfg.lower)},
        {"u", opt(upper)},
        {"V_tot", num(cfg.budget)},
    };
    schema["uncertainty"] = {{"u_l", num(cfg.u_l)}, {"u_u", num(cfg.u_u)}};
    schema["nominal"] = {
        {"step_init", num(cfg.nominal.step_init)},
        {"backtrack", num(cfg.nominal.backtrack)},
        {"armijo_c1", num(cfg.nominal.armijo_c1)},
        {"eps_stat", num(cfg.nominal.eps_stat)},
        {"max_iterations", count(cfg.nominal.max_iterations)},
    };
    schema["bundle"] = {
        {"serious_threshold", num(cfg.bundle.serious_threshold)},
        {"richness_threshold", num(cfg.bundle.richness_threshold)},
        {"tau_decrease_threshold", num(cfg.bundle.tau_decrease_threshold)},
        {"tau_init", num(cfg.bundle.tau_init)},
        {"tau_max", num(cfg.bundle.tau_max)},
        {"downshift", num(cfg.bundle.downshift)},
        {"eps_stop", num(cfg.bundle.eps_stop)},
        {"eps_sub", num(cfg.bundle.eps_sub)},
        {"max_inner", count(cfg.bundle.max_inner)},
        {"max_outer", count(cfg.bundle.max_outer)},
        {"max_planes", count(cfg.bundle.max_planes)},
    };
    schema["output"] = {{"directory",
                         Setter([&cfg](const std::string& v,
                                       const detail::ConfigCursor& c) {
                             cfg.output_dir = detail::parse_string(v, c);
                         })}};

    std::set<std::string> seen;
    std::string raw;
    while (std::getline(in, raw)) {
        ++at.line;
        const std::string line = detail::trim(detail::strip_comment(raw));
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                at.fail("unterminated section header");
            const std::string sec =
                detail::trim(line.substr(1, line.size() - 2));
            if (schema.find(sec) == schema.end()) {
                at.section.clear();
                at.fail("unknown section [" + sec + "]");
            }
            at.section = sec;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            at.fail("expected 'key = value', got '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = line.substr(eq + 1);
        if (at.section.empty())
            at.fail("key '" + key + "' appears before any section");
        const auto& keys = schema[at.section];
        const auto it = keys.find(key);
        if (it == keys.end())
            at.fail("unknown key '" + key + "'");
        if (!seen.insert(at.section + "." + key).second)
            at.fail("duplicate key '" + key + "'");
        it->second(value, at);
    }

    at.line = 0;
    at.section.clear();
    if (cfg.T <= 0.0)
        throw ConfigError(name + ": T must be positive");
    cfg.upper = upper ? *upper : 3.0 * cfg.budget / cfg.T;

    if (cfg.objective.weight_mean < 0.0 || cfg.objective.weight_var < 0.0)
        throw ConfigError(name + ": objective weights must be nonnegative");
    if (cfg.objective.target_mean <= 0.0)
        throw ConfigError(name + ": target_mean must be positive");
    if (cfg.output_dir.empty())
        throw ConfigError(name + ": output directory must not be empty");
    try {
        validate(cfg.kinetics);
        validate(cfg.nominal);
        validate(cfg.bundle);
        admissible_set(cfg);
        uncertainty_set(cfg);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        // module invariants surface as config errors at load time
        throw ConfigError(name + ": " + e.what());
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

} // namespace precip
