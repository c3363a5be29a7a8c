#include <doctest.h>

#include <cmath>

#include "hmf/evolution.hpp"
#include "hmf/profiles.hpp"
#include "hmf/volterra.hpp"

using namespace hmf;

namespace {

Grid small_grid(double T) { return make_grid(4, T + 4.0, 0.05, T); }

FourierField gaussian_pair(const Grid& g, double amplitude = 1.0) {
    return make_asymptotic_datum(amplitude, {{-1, 1.0}, {1, 1.0}}, 1.0, g);
}

}  // namespace

TEST_SUITE("evolution") {

TEST_CASE("linear forcing term") {
    const Grid g = small_grid(4.0);
    const FourierField zero(g);
    EvolutionParams p;
    p.t_final = 4.0;
    const double t = 1.3;
    ZetaPair z{cplx(1.0), cplx(1.0), 0.0};
    const FourierField d = rhs(zero, t, z, p);
    // s (i/2) zeta i (xi - t) e^{-(xi - t)^2/2} = -(1/2)(xi - t) e^{-(xi - t)^2/2}
    for (std::size_t j = 0; j < g.xi_count(); j += 13) {
        const double u = g.xi(j) - t;
        CHECK(std::abs(d.at(1, j) - cplx(-0.5 * u * std::exp(-0.5 * u * u))) < 1e-15);
        CHECK(d.at(2, j) == cplx{});
        CHECK(d.at(0, j) == cplx{});
    }
}

TEST_CASE("nonlinear coupling term") {
    const Grid g = small_grid(4.0);
    FourierField h(g);
    for (std::size_t j = 0; j < g.xi_count(); ++j) {
        h.at(0, j) = std::exp(-0.5 * g.xi(j) * g.xi(j));
    }
    EvolutionParams p;
    p.t_final = 4.0;
    p.epsilon = 1.0;
    p.profile.eta_prime_hat = [](double) { return cplx{}; };
    const double t = 0.7;
    const cplx zp(0.3, 0.1);
    ZetaPair z{zp, std::conj(zp), 0.0};
    const FourierField d = rhs(h, t, z, p);
    // n = 1 receives k = 1 from h_0: -(1/2) zeta_1 h_0(xi - t)(xi - t)
    for (std::size_t j = 100; j + 100 < g.xi_count(); j += 17) {
        const double xi = g.xi(j);
        const cplx expect = -0.5 * zp * std::exp(-0.5 * (xi - t) * (xi - t)) * (xi - t);
        CHECK(std::abs(d.at(1, j) - expect) < 1e-7);
    }
}

TEST_CASE("parameter validation") {
    const Grid g = small_grid(4.0);
    EvolutionParams p;
    p.t_final = 4.0;
    CHECK_NOTHROW(validate(p, g));
    p.d_t = 0.2;
    CHECK_THROWS_AS(validate(p, g), std::invalid_argument);
    p.d_t = 0.01;
    p.sign = 0.5;
    CHECK_THROWS_AS(validate(p, g), std::invalid_argument);
    p.sign = 1.0;
    p.t_final = 4.005;
    CHECK_THROWS_AS(validate(p, g), std::invalid_argument);
    p.t_final = 5.0;
    CHECK_THROWS_AS(validate(p, g), std::invalid_argument);
}

TEST_CASE("zero state stays zero") {
    const Grid g = small_grid(2.0);
    EvolutionParams p;
    p.t_final = 2.0;
    p.epsilon = 0.1;
    const Trajectory tr = forward_solve(FourierField(g), p);
    CHECK(tr.back().sup_abs() == 0.0);
    CHECK(tr.field.size() == 201);
    CHECK(tr.times.size() == 21);
}

TEST_CASE("linear field against the forward Volterra equation") {
    const double T = 10.0;
    const Grid g = small_grid(T);
    EvolutionParams p;
    p.t_final = T;
    const Trajectory tr = forward_solve(gaussian_pair(g), p);

    const double h = 1e-3;
    const auto n = static_cast<std::size_t>(std::llround(T / h));
    const KernelOnGrid k = sample_kernel(kernel_j(maxwellian(), 1), h / 2, T, 1.0);
    std::vector<cplx> forcing(2 * n + 1);
    for (std::size_t i = 0; i < forcing.size(); ++i) {
        const double t = h / 2 * static_cast<double>(i);
        forcing[i] = std::exp(-0.5 * t * t);
    }
    const auto oracle = solve_volterra_extrapolated(forcing, k, Direction::forward);
    double err = 0.0;
    for (std::size_t i = 0; i < tr.field.size(); ++i) {
        const auto m = static_cast<std::size_t>(std::llround(tr.field.t[i] / h));
        err = std::max(err, std::abs(tr.field.zeta1[i] - oracle[m]));
    }
    CHECK(err < 1e-6);
}

TEST_CASE("conservation in a weakly nonlinear run") {
    const double T = 10.0;
    const Grid g = small_grid(T);
    EvolutionParams p;
    p.t_final = T;
    p.epsilon = 0.01;
    const Trajectory tr = forward_solve(gaussian_pair(g), p);
    CHECK(tr.mass_drift <= 1e-10);
    CHECK(tr.reality_drift < 1e-12);
    CHECK(tr.conjugation_defect < 1e-12);
}

TEST_CASE("blow-up past the cap") {
    const Grid g = small_grid(2.0);
    EvolutionParams p;
    p.t_final = 2.0;
    p.overflow_cap = 0.5;
    CHECK_THROWS_AS(forward_solve(gaussian_pair(g), p), BlowUp);
}

}  // TEST_SUITE
