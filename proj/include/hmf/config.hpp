// Sectioned key-value run configuration.
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hmf {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"stability", "forward", "backward", "nonperturbative",
                                                "bgk",       "weights", "compare",  "sweep"};
    return names;
}

struct RunConfig {
    std::string scenario;
    std::string id;  // empty: derived from the scenario and a digest of the settings

    // [grid]
    int n_max = 4;
    double xi_max = 0.0;  // 0: horizon + 4
    double d_xi = 0.05;

    // [time]
    double d_t = 0.01;
    double T = 20.0;
    double tau = 0.0;
    int snapshot_every = 10;

    // [physics]
    double epsilon = 0.0;
    double sign = 1.0;
    std::string profile = "maxwellian";  // or bgk
    double temperature = 1.0;
    double beta = 3.0;

    // [datum]
    double amplitude = 1.0;
    double width = 1.0;
    std::string shape = "gaussian";
    std::map<int, double> modes{{-1, 1.0}, {1, 1.0}};
    std::vector<double> centers{0.0};

    // [picard]
    int max_iters = 30;
    double tol = 1e-6;

    // [norms]
    double lambda = 0.3;
    double lambda_prime = 0.0;  // 0: lambda / 2
    double delta = 1e-3;
    double lambda0 = 0.5;
    int p = 6;
    int q = 3;

    // [stability]
    double omega_max = 15.0;
    int n_scan = 2001;
    double threshold = 0.05;
    std::optional<double> bound_M;

    // [weights]
    std::vector<double> deltas{1e-4, 1e-3, 1e-2};
    double weight_T = 200.0;
    double t_max = 100.0;
    double weight_dt = 0.01;

    // [compare]
    double cap = 10.0;
    double rough_width = 0.0;  // > 0 seeds the forward profile with a wider datum

    // [diagnostics]
    double echo_threshold = 1.5;
    double fit_from = -1.0;  // < 0: T / 2
    double fit_to = -1.0;    // < 0: T

    // [continuation]
    std::vector<double> horizons;

    // [bgk]
    double nu_max = 2.0;
    int nu_points = 201;

    // [output]
    int snapshot_stride = 10;  // every k-th stored snapshot goes to snapshots.bin

    // [sweep]
    std::string sweep_base;
    std::string sweep_axis;
    std::vector<double> sweep_values;

    /// xi_max after resolving the automatic default.
    [[nodiscard]] double effective_xi_max() const;
    [[nodiscard]] double effective_lambda_prime() const { return lambda_prime > 0.0 ? lambda_prime : 0.5 * lambda; }
    [[nodiscard]] double horizon() const;
};

/// Every accepted "section.key".
const std::vector<std::string>& config_keys();

/// True for keys holding a single number (valid sweep axes).
bool is_numeric_key(const std::string& key);

/// Parses one value into the field named by key. Throws ConfigError.
void set_value(RunConfig& config, const std::string& key, const std::string& value);

/// Canonical (key, value) pairs in key order, reals printed with 17 digits.
std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& config);

/// Parses INI text. source names the origin in error messages.
RunConfig parse_config(const std::string& text, const std::string& scenario, const std::string& source = "<config>");

/// Reads and parses path, then validates.
RunConfig load_config(const std::string& path, const std::string& scenario);

/// Throws ConfigError naming the violated precondition.
void validate(const RunConfig& config);

}  // namespace hmf
