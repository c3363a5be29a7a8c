#include <doctest.h>

#include <string>

#include "hmf/config.hpp"

using namespace hmf;

namespace {

std::string echo_as_ini(const RunConfig& c) {
    std::string text;
    std::string section;
    for (const auto& [k, v] : config_echo(c)) {
        if (k == "run.scenario" || v.empty()) {
            continue;
        }
        const auto dot = k.find('.');
        if (k.substr(0, dot) != section) {
            section = k.substr(0, dot);
            text += "[" + section + "]\n";
        }
        text += k.substr(dot + 1) + " = " + v + "\n";
    }
    return text;
}

std::string error_of(const std::string& text, const std::string& scenario) {
    try {
        validate(parse_config(text, scenario, "cfg.ini"));
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults validate for every scenario but sweep") {
    for (const auto& s : scenario_names()) {
        RunConfig c;
        c.scenario = s;
        if (s == "sweep") {
            CHECK_THROWS_AS(validate(c), ConfigError);
        } else {
            CHECK_NOTHROW(validate(c));
        }
    }
}

TEST_CASE("a minimal file") {
    const RunConfig c = parse_config("[time]\nT = 10\n[physics]\nepsilon = 0.01\n", "backward");
    CHECK(c.T == 10.0);
    CHECK(c.epsilon == 0.01);
    CHECK(c.effective_xi_max() == doctest::Approx(14.0));
    CHECK(c.effective_lambda_prime() == doctest::Approx(0.15));
    CHECK_NOTHROW(validate(c));
}

TEST_CASE("violated invariant names itself") {
    const std::string e = error_of("[time]\nT = 10\ntau = 12\n", "backward");
    CHECK(e.find("tau < T") != std::string::npos);
    CHECK(e.find("tau = 12") != std::string::npos);
    CHECK(error_of("[grid]\nxi_max = 5\n", "forward").find("xi_max") != std::string::npos);
    CHECK(error_of("[norms]\ndelta = 0.5\n", "forward").find("delta") != std::string::npos);
    CHECK(error_of("[norms]\nlambda_prime = 0.4\n", "nonperturbative").find("lambda") != std::string::npos);
    CHECK(error_of("[continuation]\nhorizons = 5, 10\n", "backward").find("horizons") != std::string::npos);
}

TEST_CASE("unknown keys are listed") {
    const std::string e = error_of("[physics]\nepsilonn = 0.1\n", "backward");
    CHECK(e.find("cfg.ini") != std::string::npos);
    CHECK(e.find("physics.epsilonn") != std::string::npos);
}

TEST_CASE("syntax errors carry a line number") {
    const std::string e = error_of("[time]\nT = 10\nthis line is not ini\n", "backward");
    CHECK(e.find("cfg.ini:3:") != std::string::npos);
}

TEST_CASE("bad numbers") {
    CHECK(error_of("[time]\nT = ten\n", "backward").find("time.T") != std::string::npos);
    CHECK(error_of("[grid]\nn_max = 2.5\n", "backward").find("grid.n_max") != std::string::npos);
}

TEST_CASE("lists and mode weights") {
    const RunConfig c =
        parse_config("[datum]\nmodes = 1:0.5, -1:0.5, 2:0.25\ncenters = 0, 1.5\n[grid]\nn_max = 3\n", "forward");
    REQUIRE(c.modes.size() == 3);
    CHECK(c.modes.at(2) == 0.25);
    CHECK(c.centers == std::vector<double>{0.0, 1.5});
    CHECK(error_of("[datum]\nmodes = 1\n", "forward").find("mode:weight") != std::string::npos);
    CHECK(error_of("[datum]\nmodes = 0:1\n", "forward").find("mode 0") != std::string::npos);
}

TEST_CASE("sweep axis must be numeric") {
    CHECK(error_of("[sweep]\nbase = backward\naxis = physics.profile\nvalues = 1\n", "sweep")
              .find("sweep.axis") != std::string::npos);
    CHECK(error_of("[sweep]\nbase = sweep\naxis = physics.epsilon\nvalues = 1\n", "sweep")
              .find("sweep.base") != std::string::npos);
    CHECK(error_of("[sweep]\nbase = backward\naxis = physics.epsilon\nvalues = 0.01, 0.1\n", "sweep").empty());
    CHECK(is_numeric_key("physics.epsilon"));
    CHECK_FALSE(is_numeric_key("datum.modes"));
    // members are checked one by one
    CHECK(error_of("[sweep]\nbase = backward\naxis = time.tau\nvalues = 0, 25\n", "sweep").find("tau < T") !=
          std::string::npos);
}

TEST_CASE("echo reparses to the same settings") {
    RunConfig c = parse_config("[physics]\nepsilon = 0.1\n[datum]\namplitude = 0.30000000000000004\n", "backward");
    c.bound_M = 2.5;
    const std::string text = echo_as_ini(c);
    const RunConfig back = parse_config(text, "backward");
    CHECK(config_echo(back) == config_echo(c));
    CHECK(back.amplitude == c.amplitude);
}

}  // TEST_SUITE
