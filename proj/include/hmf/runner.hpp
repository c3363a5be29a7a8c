// Scenario execution, output directories and manifests.
#pragma once

#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>

#include "hmf/config.hpp"

namespace hmf {

inline constexpr const char* kVersion = "0.1.0";

struct RunOptions {
    std::filesystem::path out_root = "runs";
    bool overwrite = false;
    int threads = 1;
};

/// Per-run metrics, shared by every scenario so sweeps can tabulate them.
struct Headline {
    bool converged = false;
    double lambda_fit = std::numeric_limits<double>::quiet_NaN();
    double contraction_ratio = std::numeric_limits<double>::quiet_NaN();
    double M_norm = std::numeric_limits<double>::quiet_NaN();
    double N_norm = std::numeric_limits<double>::quiet_NaN();
    double a_T0 = std::numeric_limits<double>::quiet_NaN();  // weights scenario only
};

struct RunOutcome {
    std::string id;
    std::filesystem::path dir;
    bool ok = false;
    std::string error;
    Headline headline;
};

/// Refusal to reuse an existing run directory.
class RunExists : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// config.id, or "<scenario>-" plus 12 hex digits of the settings digest.
std::string resolve_run_id(const RunConfig& config);

/// Executes the scenario under out_root/<id>. Module errors are captured into
/// the manifest (status "failed"); the manifest is always written last.
/// Throws RunExists when the directory exists and overwrite is off.
RunOutcome run(const RunConfig& config, const RunOptions& options);

}  // namespace hmf
