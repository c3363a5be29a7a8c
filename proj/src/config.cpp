#include "hmf/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace hmf {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& text) {
    const std::string s = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size()) {
        throw ConfigError(key + ": expected a number, got '" + text + "'");
    }
    return v;
}

int to_int(const std::string& key, const std::string& text) {
    const double v = to_real(key, text);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
        throw ConfigError(key + ": expected an integer, got '" + text + "'");
    }
    return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split(text)) {
        out.push_back(to_real(key, item));
    }
    return out;
}

std::string list_text(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? ", " : "") + fmt(v[i]);
    }
    return s;
}

enum class Kind { real, integer, text, list };

struct Entry {
    Kind kind;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class M>
Entry real_entry(M RunConfig::*field) {
    return {Kind::real, [field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = to_real(k, v); },
            [field](const RunConfig& c) { return fmt(c.*field); }};
}

Entry int_entry(int RunConfig::*field) {
    return {Kind::integer, [field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = to_int(k, v); },
            [field](const RunConfig& c) { return std::to_string(c.*field); }};
}

Entry text_entry(std::string RunConfig::*field) {
    return {Kind::text, [field](RunConfig& c, const std::string&, const std::string& v) { c.*field = trim(v); },
            [field](const RunConfig& c) { return c.*field; }};
}

Entry list_entry(std::vector<double> RunConfig::*field) {
    return {Kind::list, [field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = to_list(k, v); },
            [field](const RunConfig& c) { return list_text(c.*field); }};
}

const std::map<std::string, Entry>& table() {
    static const std::map<std::string, Entry> t = [] {
        std::map<std::string, Entry> m;
        m["run.id"] = text_entry(&RunConfig::id);
        m["grid.n_max"] = int_entry(&RunConfig::n_max);
        m["grid.xi_max"] = real_entry(&RunConfig::xi_max);
        m["grid.d_xi"] = real_entry(&RunConfig::d_xi);
        m["time.d_t"] = real_entry(&RunConfig::d_t);
        m["time.T"] = real_entry(&RunConfig::T);
        m["time.tau"] = real_entry(&RunConfig::tau);
        m["time.snapshot_every"] = int_entry(&RunConfig::snapshot_every);
        m["physics.epsilon"] = real_entry(&RunConfig::epsilon);
        m["physics.sign"] = real_entry(&RunConfig::sign);
        m["physics.profile"] = text_entry(&RunConfig::profile);
        m["physics.temperature"] = real_entry(&RunConfig::temperature);
        m["physics.beta"] = real_entry(&RunConfig::beta);
        m["datum.amplitude"] = real_entry(&RunConfig::amplitude);
        m["datum.width"] = real_entry(&RunConfig::width);
        m["datum.shape"] = text_entry(&RunConfig::shape);
        m["datum.modes"] = {Kind::text,
                            [](RunConfig& c, const std::string& k, const std::string& v) {
                                c.modes.clear();
                                for (const auto& item : split(v)) {
                                    const auto colon = item.find(':');
                                    if (colon == std::string::npos) {
                                        throw ConfigError(k + ": expected 'mode:weight' pairs, got '" + item + "'");
                                    }
                                    c.modes[to_int(k, item.substr(0, colon))] = to_real(k, item.substr(colon + 1));
                                }
                            },
                            [](const RunConfig& c) {
                                std::string s;
                                for (const auto& [n, w] : c.modes) {
                                    s += (s.empty() ? "" : ", ") + std::to_string(n) + ":" + fmt(w);
                                }
                                return s;
                            }};
        m["datum.centers"] = list_entry(&RunConfig::centers);
        m["picard.max_iters"] = int_entry(&RunConfig::max_iters);
        m["picard.tol"] = real_entry(&RunConfig::tol);
        m["norms.lambda"] = real_entry(&RunConfig::lambda);
        m["norms.lambda_prime"] = real_entry(&RunConfig::lambda_prime);
        m["norms.delta"] = real_entry(&RunConfig::delta);
        m["norms.lambda0"] = real_entry(&RunConfig::lambda0);
        m["norms.p"] = int_entry(&RunConfig::p);
        m["norms.q"] = int_entry(&RunConfig::q);
        m["stability.omega_max"] = real_entry(&RunConfig::omega_max);
        m["stability.n_scan"] = int_entry(&RunConfig::n_scan);
        m["stability.threshold"] = real_entry(&RunConfig::threshold);
        m["stability.bound_M"] = {Kind::real,
                                  [](RunConfig& c, const std::string& k, const std::string& v) {
                                      c.bound_M = to_real(k, v);
                                  },
                                  [](const RunConfig& c) { return c.bound_M ? fmt(*c.bound_M) : std::string{}; }};
        m["weights.deltas"] = list_entry(&RunConfig::deltas);
        m["weights.T"] = real_entry(&RunConfig::weight_T);
        m["weights.t_max"] = real_entry(&RunConfig::t_max);
        m["weights.d_t"] = real_entry(&RunConfig::weight_dt);
        m["compare.cap"] = real_entry(&RunConfig::cap);
        m["compare.rough_width"] = real_entry(&RunConfig::rough_width);
        m["diagnostics.echo_threshold"] = real_entry(&RunConfig::echo_threshold);
        m["diagnostics.fit_from"] = real_entry(&RunConfig::fit_from);
        m["diagnostics.fit_to"] = real_entry(&RunConfig::fit_to);
        m["continuation.horizons"] = list_entry(&RunConfig::horizons);
        m["bgk.nu_max"] = real_entry(&RunConfig::nu_max);
        m["bgk.nu_points"] = int_entry(&RunConfig::nu_points);
        m["output.snapshot_stride"] = int_entry(&RunConfig::snapshot_stride);
        m["sweep.base"] = text_entry(&RunConfig::sweep_base);
        m["sweep.axis"] = text_entry(&RunConfig::sweep_axis);
        m["sweep.values"] = list_entry(&RunConfig::sweep_values);
        return m;
    }();
    return t;
}

void require(bool ok, const std::string& invariant, const std::string& detail = {}) {
    if (!ok) {
        throw ConfigError("invariant violated: " + invariant + (detail.empty() ? "" : " (" + detail + ")"));
    }
}

bool uses_dynamics(const std::string& s) {
    return s == "forward" || s == "backward" || s == "nonperturbative" || s == "compare";
}

}  // namespace

double RunConfig::horizon() const {
    double h = T;
    for (double x : horizons) {
        h = std::max(h, x);
    }
    return h;
}

double RunConfig::effective_xi_max() const { return xi_max > 0.0 ? xi_max : horizon() + 4.0; }

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, entry] : table()) {
            k.push_back(name);
        }
        return k;
    }();
    return keys;
}

bool is_numeric_key(const std::string& key) {
    const auto it = table().find(key);
    return it != table().end() && (it->second.kind == Kind::real || it->second.kind == Kind::integer);
}

void set_value(RunConfig& config, const std::string& key, const std::string& value) {
    const auto it = table().find(key);
    if (it == table().end()) {
        throw ConfigError("unknown key '" + key + "'");
    }
    it->second.set(config, key, value);
}

std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& config) {
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("run.scenario", config.scenario);
    for (const auto& [name, entry] : table()) {
        out.emplace_back(name, entry.get(config));
    }
    return out;
}

RunConfig parse_config(const std::string& text, const std::string& scenario, const std::string& source) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    RunConfig config;
    config.scenario = scenario;
    std::vector<std::string> unknown;
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            unknown.push_back(section);
            continue;
        }
        for (const auto& [key, leaf] : body) {
            const std::string full = section + "." + key;
            if (table().count(full) == 0) {
                unknown.push_back(full);
                continue;
            }
            set_value(config, full, leaf.get_value<std::string>());
        }
    }
    if (!unknown.empty()) {
        std::string list;
        for (const auto& k : unknown) {
            list += (list.empty() ? "" : ", ") + k;
        }
        throw ConfigError(source + ": unknown key(s): " + list);
    }
    return config;
}

RunConfig load_config(const std::string& path, const std::string& scenario) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    RunConfig config = parse_config(ss.str(), scenario, path);
    validate(config);
    return config;
}

void validate(const RunConfig& c) {
    const auto& names = scenario_names();
    require(std::find(names.begin(), names.end(), c.scenario) != names.end(), "scenario is one of " +
            [&] {
                std::string s;
                for (const auto& n : names) {
                    s += (s.empty() ? "" : "|") + n;
                }
                return s;
            }(),
            "got '" + c.scenario + "'");
    for (char ch : c.id) {
        require(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.',
                "run.id uses [A-Za-z0-9._-]", "got '" + c.id + "'");
    }
    require(c.id != "." && c.id != "..", "run.id is not a relative path component");

    const std::string scen = c.scenario == "sweep" ? c.sweep_base : c.scenario;
    if (c.scenario == "sweep") {
        require(!c.sweep_base.empty() && c.sweep_base != "sweep" &&
                    std::find(names.begin(), names.end(), c.sweep_base) != names.end(),
                "sweep.base names a non-sweep scenario", "got '" + c.sweep_base + "'");
        require(is_numeric_key(c.sweep_axis), "sweep.axis names a numeric config field", "got '" + c.sweep_axis + "'");
        require(!c.sweep_values.empty(), "sweep.values is non-empty");
        for (double v : c.sweep_values) {
            RunConfig member = c;
            member.scenario = c.sweep_base;
            set_value(member, c.sweep_axis, fmt(v));
            validate(member);
        }
        return;
    }

    require(c.profile == "maxwellian" || c.profile == "bgk", "physics.profile is maxwellian or bgk",
            "got '" + c.profile + "'");
    require(c.temperature > 0.0, "physics.temperature > 0");
    require(c.beta > 0.0, "physics.beta > 0");
    require(c.sign == 1.0 || c.sign == -1.0, "physics.sign is +1 or -1");

    if (scen == "stability") {
        require(c.omega_max > 0.0, "stability.omega_max > 0");
        require(c.n_scan >= 3, "stability.n_scan >= 3");
        require(c.threshold >= 0.0, "stability.threshold >= 0");
        require(!c.bound_M || *c.bound_M > 0.0, "stability.bound_M > 0");
        require(c.lambda > 0.0, "norms.lambda > 0");
        return;
    }
    if (scen == "bgk") {
        require(c.nu_max > 0.0, "bgk.nu_max > 0");
        require(c.nu_points >= 2, "bgk.nu_points >= 2");
        return;
    }
    if (scen == "weights") {
        require(!c.deltas.empty(), "weights.deltas is non-empty");
        for (double d : c.deltas) {
            require(d > 0.0, "weights.deltas > 0", fmt(d));
        }
        require(c.delta > 0.0, "norms.delta > 0");
        require(c.weight_T > 0.0, "weights.T > 0");
        require(c.t_max > 0.0, "weights.t_max > 0");
        require(c.weight_dt > 0.0 && c.weight_dt <= 0.1, "0 < weights.d_t <= 0.1");
        return;
    }
    if (!uses_dynamics(scen)) {
        return;
    }
    require(c.n_max >= 2, "grid.n_max >= 2", std::to_string(c.n_max));
    require(c.d_xi > 0.0, "grid.d_xi > 0");
    require(c.d_t > 0.0 && c.d_t <= 0.1, "0 < time.d_t <= 0.1", fmt(c.d_t));
    require(c.T > 0.0, "time.T > 0");
    require(c.tau >= 0.0, "time.tau >= 0");
    require(c.tau < c.T, "tau < T", "tau = " + fmt(c.tau) + ", T = " + fmt(c.T));
    require(c.effective_xi_max() >= c.horizon() + 4.0 - 1e-12, "grid.xi_max >= T + 4",
            "xi_max = " + fmt(c.effective_xi_max()));
    require(c.snapshot_every >= 1, "time.snapshot_every >= 1");
    require(c.epsilon >= 0.0, "physics.epsilon >= 0");
    require(c.width > 0.0, "datum.width > 0");
    require(c.shape == "gaussian" || c.shape == "sech", "datum.shape is gaussian or sech", "got '" + c.shape + "'");
    for (const auto& [n, w] : c.modes) {
        require(n != 0 || w == 0.0, "datum.modes has no weight on mode 0");
        require(std::abs(n) <= c.n_max, "datum.modes lie within n_max", std::to_string(n));
    }
    require(c.max_iters >= 1, "picard.max_iters >= 1");
    require(c.tol > 0.0, "picard.tol > 0");
    require(c.lambda > 0.0, "norms.lambda > 0");
    require(c.delta > 0.0, "norms.delta > 0");
    require(c.cap > 0.0, "compare.cap > 0");
    require(c.snapshot_stride >= 1, "output.snapshot_stride >= 1");
    require(c.horizons.empty() || std::abs(c.horizons.back() - c.T) < 1e-12,
            "continuation.horizons ends at time.T");
    double prev = c.tau;
    for (double h : c.horizons) {
        require(h > prev, "continuation.horizons increase and exceed tau", fmt(h));
        prev = h;
    }
    if (scen == "forward") {
        require(c.delta < 2.0 * c.lambda0 / M_PI, "delta < 2 lambda0 / pi");
        require(c.q >= 3, "norms.q >= 3");
        require(c.p >= c.q + 3, "norms.p >= norms.q + 3");
    }
    if (scen == "nonperturbative") {
        require(c.effective_lambda_prime() < c.lambda, "lambda' < lambda");
    }
    const double fit_lo = c.fit_from < 0.0 ? 0.5 * c.T : c.fit_from;
    const double fit_hi = c.fit_to < 0.0 ? c.T : c.fit_to;
    require(fit_lo < fit_hi, "diagnostics.fit_from < diagnostics.fit_to");
}

}  // namespace hmf
