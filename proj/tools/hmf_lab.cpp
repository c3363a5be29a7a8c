// hmf_lab <scenario> [--config FILE] [--out DIR] [--overwrite] [--threads N]
//
// Exit status: 0 success, 1 scenario failure (see manifest.json), 2 bad
// configuration or usage, 3 run directory already exists.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hmf/config.hpp"
#include "hmf/runner.hpp"
#include "hmf/serialize.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Vlasov-HMF spectral lab: forward, backward and non-perturbative scattering runs"};
    app.set_version_flag("--version", std::string(hmf::kVersion));
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = "runs";
    bool overwrite = false;
    int threads = 1;
    app.add_option("--config", config_path, "INI file with [section] key = value entries")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "root directory for run outputs")->capture_default_str();
    app.add_flag("--overwrite", overwrite, "replace an existing run directory");
    app.add_option("--threads", threads, "parallel sweep members")->check(CLI::PositiveNumber)->capture_default_str();

    const char* blurbs[] = {
        "Laplace transform scan of the background kernel",
        "forward Cauchy problem from a datum at t = 0",
        "scattering problem by Picard iteration",
        "scattering on [tau, T] around a BGK state, epsilon = 1",
        "BGK self-consistency curve and fixed point",
        "weight ODE a_{T,delta} and a_inf",
        "backward run followed by a forward round trip",
        "one scenario over a list of values of a numeric key",
    };
    const auto& names = hmf::scenario_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        app.add_subcommand(names[i], blurbs[i]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    const std::string scenario = app.get_subcommands().front()->get_name();

    hmf::RunConfig config;
    try {
        if (config_path.empty()) {
            config.scenario = scenario;
            hmf::validate(config);
        } else {
            config = hmf::load_config(config_path, scenario);
        }
    } catch (const hmf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    hmf::RunOptions options;
    options.out_root = out_dir;
    options.overwrite = overwrite;
    options.threads = threads;
    try {
        const hmf::RunOutcome out = hmf::run(config, options);
        std::cout << "run " << out.id << ": " << (out.ok ? "ok" : "failed") << '\n';
        std::cout << "  dir        " << out.dir.string() << '\n';
        std::cout << "  converged  " << (out.headline.converged ? "yes" : "no") << '\n';
        if (!out.ok) {
            std::cerr << "error: " << out.error << '\n';
            return 1;
        }
        return 0;
    } catch (const hmf::RunExists& e) {
        std::cerr << e.what() << '\n';
        return 3;
    } catch (const hmf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
