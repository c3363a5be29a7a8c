#include <doctest.h>

#include <cmath>
#include <random>

#include "hmf/config.hpp"
#include "hmf/evolution.hpp"
#include "hmf/norms.hpp"
#include "hmf/profiles.hpp"
#include "hmf/volterra.hpp"

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

std::mt19937_64& rng() {
    static std::mt19937_64 g(20261015);
    return g;
}

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

FourierField random_field(const Grid& g, double scale = 1.0) {
    FourierField f(g);
    for (int n = -g.n_max; n <= g.n_max; ++n) {
        const double c = uniform(-1.0, 1.0);
        const double w = uniform(0.5, 1.5);
        const double s = uniform(-1.0, 1.0);
        for (std::size_t j = 0; j < g.xi_count(); ++j) {
            const double z = (g.xi(j) - s) / w;
            f.at(n, j) = scale * cplx(c, uniform(-1.0, 1.0) * 0.1) * std::exp(-0.5 * z * z);
        }
    }
    f.at(0, g.half_nodes) = 0.0;
    return enforce_reality(f);
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("real fields interpolate to conjugate pairs") {
    const Grid g = make_grid(3, 8.0, 0.1, 4.0);
    for (int trial = 0; trial < 20; ++trial) {
        const FourierField f = random_field(g);
        const int n = static_cast<int>(uniform(-3.0, 3.999));
        const double xi = uniform(-7.5, 7.5);
        CHECK(std::abs(eval_shifted(f, -n, -xi) - std::conj(eval_shifted(f, n, xi))) < 1e-13);
    }
}

TEST_CASE("kernel conjugation for random temperatures") {
    for (int trial = 0; trial < 20; ++trial) {
        const Profile p = maxwellian(uniform(0.2, 3.0));
        const double t = uniform(0.0, 10.0);
        const double s = trial % 2 ? 1.0 : -1.0;
        CHECK(std::abs(kernel_j(p, -1, s)(t) - std::conj(kernel_j(p, 1, s)(t))) < 1e-15);
        CHECK(std::abs(kernel_j(p, 1, -1.0)(t) + kernel_j(p, 1, 1.0)(t)) < 1e-15);
    }
}

TEST_CASE("Laplace transform is linear") {
    for (int trial = 0; trial < 5; ++trial) {
        const double t1 = uniform(0.5, 2.0);
        const double t2 = uniform(0.5, 2.0);
        const cplx a(uniform(-1, 1), uniform(-1, 1));
        const cplx b(uniform(-1, 1), uniform(-1, 1));
        const auto j1 = kernel_j(maxwellian(t1), 1);
        const auto j2 = kernel_j(maxwellian(t2), 1);
        const auto k1 = sample_kernel(j1, 0.01, 30.0, 0.5);
        const auto k2 = sample_kernel(j2, 0.01, 30.0, 0.5);
        const auto k = sample_kernel([&](double t) { return a * j1(t) + b * j2(t); }, 0.01, 30.0, 0.5);
        const cplx sigma(uniform(0.0, 1.0), uniform(-5.0, 5.0));
        const cplx lhs = laplace(k, sigma).value;
        const cplx rhs = a * laplace(k1, sigma).value + b * laplace(k2, sigma).value;
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("forward evolution preserves reality and mass") {
    const Grid g = make_grid(3, 7.0, 0.1, 3.0);
    for (int trial = 0; trial < 3; ++trial) {
        EvolutionParams p;
        p.epsilon = uniform(0.0, 0.2);
        p.t_final = 3.0;
        const Trajectory tr = forward_solve(random_field(g, 0.3), p);
        CHECK(tr.reality_drift < 1e-12);
        CHECK(tr.mass_drift < 1e-12);
    }
}

TEST_CASE("Omega is increasing with slope beta/2 at the origin") {
    for (int trial = 0; trial < 10; ++trial) {
        const double beta = uniform(0.5, 6.0);
        double prev = 0.0;
        for (int i = 1; i <= 10; ++i) {
            const double w = omega_of_nu(beta, 0.2 * i);
            REQUIRE(w > prev);
            prev = w;
        }
        CHECK(omega_of_nu(beta, 1e-5) / 1e-5 == doctest::Approx(beta / 2.0).epsilon(1e-6));
    }
}

TEST_CASE("BGK fixed points exist exactly above beta = 2") {
    for (double beta = 2.2; beta <= 6.0; beta += 0.4) {
        const auto s = solve_bgk(beta);
        REQUIRE(s.has_value());
        CHECK(std::abs(s->residual) < 1e-9);
        CHECK(s->nu > 0.0);
    }
    for (double beta : {0.5, 1.0, 1.9}) {
        CHECK_FALSE(solve_bgk(beta).has_value());
    }
}

TEST_CASE("a_T(0) increases with T and delta") {
    for (int trial = 0; trial < 5; ++trial) {
        const double T1 = uniform(5.0, 30.0);
        const double T2 = T1 + uniform(1.0, 30.0);
        const double d = std::pow(10.0, uniform(-4.0, -2.0));
        const double a1 = solve_a(std::round(T1), d, 0.01).at_zero();
        CHECK(solve_a(std::round(T2), d, 0.01).at_zero() > a1);
        CHECK(solve_a(std::round(T1), 1.5 * d, 0.01).at_zero() > a1);
    }
}

TEST_CASE("config echo is stable under reparsing random settings") {
    for (int trial = 0; trial < 10; ++trial) {
        RunConfig c;
        c.scenario = "backward";
        c.epsilon = uniform(0.0, 1.0);
        c.lambda = uniform(0.01, 1.0);
        c.tol = std::pow(10.0, uniform(-12.0, -3.0));
        c.modes = {{-1, uniform(0, 1)}, {2, uniform(0, 1)}};
        const std::string text = echo_as_ini(c);
        const RunConfig back = parse_config(text, "backward");
        CHECK(back.epsilon == c.epsilon);
        CHECK(back.tol == c.tol);
        CHECK(back.modes == c.modes);
        CHECK(config_echo(back) == config_echo(c));
    }
}

TEST_CASE("sup distance is a metric") {
    const Grid g = make_grid(2, 6.0, 0.2, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const FourierField a = random_field(g);
        const FourierField b = random_field(g);
        const FourierField c = random_field(g);
        CHECK(sup_distance(a, a) == 0.0);
        CHECK(sup_distance(a, b) == sup_distance(b, a));
        CHECK(sup_distance(a, c) <= sup_distance(a, b) + sup_distance(b, c) + 1e-15);
    }
}

TEST_CASE("M grows with lambda") {
    FieldSeries z;
    const double rate = uniform(0.2, 1.0);
    for (int i = 0; i <= 400; ++i) {
        z.t.push_back(0.05 * i);
        z.zeta1.push_back(std::exp(-rate * 0.05 * i) * (1.0 + 0.3 * std::sin(0.05 * i)));
    }
    double prev = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double m = functional_M(z, 0.1 * k).value;
        CHECK(m >= prev);
        prev = m;
    }
}

}  // TEST_SUITE
