#include <doctest.h>

#include <cmath>

#include "hmf/norms.hpp"
#include "hmf/profiles.hpp"

using namespace hmf;

namespace {

FourierField gaussian_pair(const Grid& g, double amplitude = 1.0) {
    return make_asymptotic_datum(amplitude, {{-1, 1.0}, {1, 1.0}}, 1.0, g);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]) / x.size();
        my += std::log(y[i]) / y.size();
    }
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    }
    return sxy / sxx;
}

}  // namespace

TEST_SUITE("norms") {

TEST_CASE("japanese brackets") {
    CHECK(bracket(0, 0.0) == 1.0);
    CHECK(bracket(1, 1.0) == doctest::Approx(std::sqrt(3.0)));
    CHECK(bracket(3.0) == doctest::Approx(std::sqrt(10.0)));
}

TEST_CASE("analytic norm by direct evaluation") {
    const Grid g = make_grid(3, 10.0, 0.05, 6.0);
    const FourierField f = gaussian_pair(g, 0.5);
    double oracle = 0.0;
    for (std::size_t j = 0; j < g.xi_count(); ++j) {
        const double x = g.xi(j);
        oracle = std::max(oracle, std::exp(0.4 * std::sqrt(2.0 + x * x)) * 0.5 * std::exp(-0.5 * x * x));
    }
    const NormReport r = analytic_norm(f, 0.4);
    CHECK(r.value == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(std::abs(r.mode) == 1);
    CHECK(analytic_norm(f, 0.0).value == doctest::Approx(0.5));

    double woracle = 0.0;
    for (std::size_t j = 0; j < g.xi_count(); ++j) {
        const double x = g.xi(j);
        const double b = std::sqrt(2.0 + x * x);
        woracle = std::max(woracle, std::exp(0.4 * b) * b * b * b * 0.5 * std::exp(-0.5 * x * x));
    }
    CHECK(weighted_norm_p(f, 0.4, 3).value == doctest::Approx(woracle).epsilon(1e-14));
}

TEST_CASE("weight ODE") {
    const WeightFunction w = solve_a(50.0, 1e-3, 0.01);
    CHECK(w.a.back() == 0.0);
    for (std::size_t i = 0; i + 1 < w.a.size(); ++i) {
        REQUIRE(w.a[i] > w.a[i + 1]);
    }
    // a(0) = int_0^T delta e^{-a s}(1 + s) ds, Simpson on the returned nodes
    double acc = 0.0;
    const std::size_t n = w.a.size() - 1;
    for (std::size_t i = 0; i <= n; ++i) {
        const double s = w.t[i];
        const double wt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += wt * 1e-3 * std::exp(-w.a[i] * s) * (1.0 + s);
    }
    acc *= 0.01 / 3.0;
    CHECK(w.at_zero() == doctest::Approx(acc).epsilon(1e-8));
    CHECK(w.at(-1.0) == w.at_zero());
    CHECK(w.at(25.005) == doctest::Approx(0.5 * (w.a[2500] + w.a[2501])));
    CHECK_THROWS_AS(solve_a(10.0, 0.0, 0.01), std::invalid_argument);
}

TEST_CASE("weight scaling in delta") {
    std::vector<double> d{1e-4, 1e-3, 1e-2};
    std::vector<double> a;
    for (double x : d) {
        a.push_back(solve_a(200.0, x, 0.01).at_zero());
    }
    CHECK(std::abs(loglog_slope(d, a) - 1.0 / 3.0) < 0.1);
}

TEST_CASE("a_inf dominates every a_T") {
    const AInfinityReport r = a_infinity_report(1e-3, 100.0, 0.01);
    CHECK(r.positive);
    for (double T : {50.0, 100.0, 200.0, 400.0}) {
        CHECK(r.a0 >= solve_a(T, 1e-3, 0.01).at_zero());
    }
    for (double a : r.weight.a) {
        REQUIRE(a > 0.0);
    }
    CHECK(r.consistency < 1e-4);
    CHECK_NOTHROW(a_infinity(1e-3, 100.0, 0.01));
}

TEST_CASE("field functional M") {
    FieldSeries z;
    for (int i = 0; i <= 100; ++i) {
        z.t.push_back(0.1 * i);
        z.zeta1.push_back(std::exp(-0.1 * i));
    }
    CHECK(functional_M(z, 0.3).value == doctest::Approx(1.0));
    const NormReport grow = functional_M(z, 2.0);
    CHECK(grow.value == doctest::Approx(std::exp(10.0)));
    CHECK(grow.t == doctest::Approx(10.0));
    CHECK(functional_M(z, 0.3, 20.0, 30.0).empty_domain);
}

TEST_CASE("transport functional N against a dense mu scan") {
    const Grid g = make_grid(2, 8.0, 0.1, 4.0);
    Trajectory tr;
    tr.times = {0.0, 2.0};
    tr.snapshots = {gaussian_pair(g), gaussian_pair(g, 0.5)};
    const WeightFunction w = solve_a(4.0, 1e-2, 0.01);
    const double lambda = 0.6;
    const NormReport n = functional_N(tr, lambda, w);
    double oracle = 0.0;
    for (std::size_t s = 0; s < 2; ++s) {
        const double top = lambda - w.at(tr.times[s]);
        for (int i = 0; i < 4000; ++i) {
            const double mu = top * i / 4000.0;
            oracle = std::max(oracle, std::sqrt(top - mu) * analytic_norm(tr.snapshots[s], mu).value);
        }
    }
    CHECK(n.value <= oracle * (1.0 + 1e-9));
    CHECK(n.value >= oracle * 0.99);
}

TEST_CASE("functional preconditions") {
    FieldSeries z;
    z.t = {0.0, 1.0};
    z.zeta1 = {1.0, 0.5};
    Trajectory tr;
    const WeightFunction w = solve_a(4.0, 1e-2, 0.01);
    CHECK_THROWS_AS(functional_J_K(z, tr, 0.5, 0.4, 6, 3), std::invalid_argument);
    CHECK_THROWS_AS(functional_J_K(z, tr, 0.5, 0.01, 6, 2), std::invalid_argument);
    CHECK_THROWS_AS(functional_J_K(z, tr, 0.5, 0.01, 5, 3), std::invalid_argument);
    CHECK_THROWS_AS(functional_P_Q(z, tr, 0.3, 0.3, 1.0, w), std::invalid_argument);
    CHECK_THROWS_AS(functional_P_Q(z, tr, 0.3, 0.15, 0.0, w), std::invalid_argument);
}

TEST_CASE("J boundary value") {
    FieldSeries z;
    for (int i = 0; i <= 50; ++i) {
        z.t.push_back(0.1 * i);
        z.zeta1.push_back(std::exp(-0.5 * 0.01 * i * i));
    }
    const Grid g = make_grid(2, 9.0, 0.1, 5.0);
    Trajectory tr;
    tr.times = {0.0};
    tr.snapshots = {gaussian_pair(g)};
    const auto [J, K] = functional_J_K(z, tr, 0.5, 0.1, 6, 3);
    double oracle = 0.0;
    for (int i = 0; i <= 50; ++i) {
        const double t = 0.1 * i;
        oracle = std::max(oracle, std::exp((0.5 - 0.1 * std::atan(t)) * t) * std::pow(bracket(t), 6) *
                                      std::abs(z.zeta1[i]));
    }
    CHECK(J.value == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(K.value > 0.0);
}

TEST_CASE("theta weight scale") {
    const WeightFunction w = theta_weight(40.0, 1e-3, 0.01, 0.15, 20.0);
    const WeightFunction inf = a_infinity(1e-3, 20.0, 0.01);
    CHECK(w.Delta == doctest::Approx(0.15 / inf.at(20.0)).epsilon(1e-12));
    CHECK(w.T == 40.0);
}

}  // TEST_SUITE
