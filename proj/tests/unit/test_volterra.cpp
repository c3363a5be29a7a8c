#include <doctest.h>

#include <cmath>

#include "hmf/profiles.hpp"
#include "hmf/volterra.hpp"

using namespace hmf;

namespace {

KernelOnGrid exponential(double c, double a, double d_t, double t_end) {
    return sample_kernel([=](double t) { return cplx(c * std::exp(-a * t)); }, d_t, t_end, a);
}

// z = 1 + c int_0^t e^{-a(t-s)} z(s) ds
double exp_kernel_solution(double c, double a, double t) { return 1.0 + c * std::expm1((c - a) * t) / (c - a); }

// Simpson with h = 1e-4 on [0, 40] of e^{-sigma t} j_1(t), the Maxwellian kernel.
cplx brute_laplace(cplx sigma) {
    const auto j = kernel_j(maxwellian(), 1);
    const int n = 400000;
    const double h = 40.0 / n;
    cplx acc{};
    for (int i = 0; i <= n; ++i) {
        const double t = i * h;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * std::exp(-sigma * t) * j(t);
    }
    return acc * h / 3.0;
}

}  // namespace

TEST_SUITE("volterra") {

TEST_CASE("laplace transform of an exponential") {
    const KernelOnGrid k = exponential(0.3, 1.0, 1e-3, 40.0);
    for (cplx sigma : {cplx(0.0), cplx(0.5, 2.0), cplx(0.0, -3.0)}) {
        const LaplaceValue v = laplace(k, sigma);
        CHECK(std::abs(v.value - 0.3 / (sigma + 1.0)) < 1e-10);
        CHECK(v.error_bound < 1e-9);
    }
    CHECK(std::abs(laplace(k, cplx(0.0, 400.0)).value) < 1e-3);
    CHECK_THROWS_AS(laplace(k, cplx(-0.1, 0.0)), std::invalid_argument);
}

TEST_CASE("maxwellian kernel at sigma = 0") {
    const KernelOnGrid k = sample_kernel(kernel_j(maxwellian(), 1), 0.02, 40.0, 1.0);
    const LaplaceValue v = laplace(k, 0.0);
    CHECK(std::abs(v.value + 0.5) + v.error_bound < 1e-6);
    for (cplx sigma : {cplx(0.0, 1.3), cplx(0.4, -2.2)}) {
        CHECK(std::abs(laplace(k, sigma).value - brute_laplace(sigma)) < 1e-8);
    }
}

TEST_CASE("stability scan") {
    const KernelOnGrid zero = sample_kernel([](double) { return cplx{}; }, 0.02, 40.0, 1.0);
    const StabilityReport z = stability_margin(zero, 15.0, 301);
    CHECK(z.margin == doctest::Approx(1.0));
    CHECK(z.satisfied);

    const KernelOnGrid k = sample_kernel(kernel_j(maxwellian(), 1), 0.02, 40.0, 1.0);
    const StabilityReport rep = stability_margin(k, 15.0, 1501);
    CHECK(rep.satisfied);
    CHECK(rep.value_at_zero_re == doctest::Approx(-0.5).epsilon(1e-6));
    // the imaginary-axis minimum, by brute-force quadrature on the same nodes
    double oracle = 1e300;
    for (int i = 0; i < 1501; ++i) {
        const double w = -15.0 + 30.0 * i / 1500.0;
        if (std::abs(std::abs(w) - 2.2) < 0.3) {
            oracle = std::min(oracle, std::abs(1.0 - brute_laplace(cplx(0.0, w))));
        }
    }
    CHECK(rep.margin <= oracle + 1e-8);
    CHECK(rep.margin == doctest::Approx(0.8669).epsilon(1e-3));

    StabilityOptions opts;
    opts.bound_M = 0.01;
    opts.lambda = 1.0;
    const StabilityReport s = stability_margin(k, 15.0, 301, opts);
    REQUIRE(s.sufficient_bound.has_value());
    CHECK(*s.sufficient_bound == doctest::Approx(M_PI * M_PI * 0.01));
    CHECK(s.sufficient_satisfied);

    CHECK_THROWS(stability_margin(k, 0.2, 101));
}

TEST_CASE("a root off the axis shows up as winding") {
    // L = 2 / (sigma + 1) equals 1 at sigma = 1, while |1 - L| >= 1 on the imaginary axis
    const KernelOnGrid k = sample_kernel([](double t) { return cplx(2.0 * std::exp(-t)); }, 0.01, 40.0, 1.0);
    const StabilityReport rep = stability_margin(k, 15.0, 3001, {0.05, 1.0, 0});
    CHECK(rep.margin == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(std::abs(rep.winding) == 1);
    CHECK_FALSE(rep.satisfied);

    const KernelOnGrid m = sample_kernel(kernel_j(maxwellian(), 1), 0.02, 40.0, 1.0);
    CHECK(stability_margin(m, 15.0, 1501).winding == 0);
}

TEST_CASE("resolvent of an exponential kernel") {
    const double c = 0.3;
    const double a = 1.0;
    const ResolventResult r = resolvent(exponential(c, a, 1e-3, 20.0));
    double err = 0.0;
    for (std::size_t i = 0; i < r.kernel.size(); ++i) {
        const double t = 1e-3 * static_cast<double>(i);
        err = std::max(err, std::abs(r.kernel.values[i] - c * std::exp(-(a + c) * t)));
    }
    CHECK(err < 1e-8);
    CHECK(r.bounded);
    CHECK(r.l1_norm == doctest::Approx(c / (a + c)).epsilon(1e-6));
}

TEST_CASE("resolvent cap flags growth") {
    // j = -2 e^{-t/10}: r grows like e^{1.9 t}
    const ResolventResult r = resolvent(exponential(-2.0, 0.1, 1e-2, 40.0), 1e3);
    CHECK_FALSE(r.bounded);
}

TEST_CASE("second-kind solvers against the exponential closed form") {
    const double c = 0.3;
    const double a = 1.0;
    const double T = 10.0;
    const double h = 0.01;
    const std::size_t n = 1000;
    const KernelOnGrid k = exponential(c, a, h, T);
    std::vector<cplx> g(n + 1, cplx(1.0));
    const auto zf = solve_volterra(g, k, Direction::forward);
    const auto zb = solve_volterra(g, k, Direction::backward);
    double ef = 0.0;
    double eb = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = h * static_cast<double>(i);
        ef = std::max(ef, std::abs(zf[i] - exp_kernel_solution(c, a, t)));
        eb = std::max(eb, std::abs(zb[i] - exp_kernel_solution(c, a, T - t)));
    }
    CHECK(ef < 1e-5);
    CHECK(eb < 1e-5);

    const KernelOnGrid kf = exponential(c, a, h / 2, T);
    std::vector<cplx> gf(2 * n + 1, cplx(1.0));
    const auto zx = solve_volterra_extrapolated(gf, kf, Direction::forward);
    double ex = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        ex = std::max(ex, std::abs(zx[i] - exp_kernel_solution(c, a, h * static_cast<double>(i))));
    }
    CHECK(ex < 1e-9);
    gf.pop_back();
    CHECK_THROWS_AS(solve_volterra_extrapolated(gf, kf, Direction::forward), std::invalid_argument);
}

TEST_CASE("minus sign flips the kernel") {
    const KernelOnGrid k = exponential(0.3, 1.0, 0.01, 5.0);
    const KernelOnGrid neg = exponential(-0.3, 1.0, 0.01, 5.0);
    std::vector<cplx> g(501);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = std::cos(0.01 * static_cast<double>(i));
    }
    const auto a = solve_volterra(g, k, Direction::backward, IntegralSign::minus);
    const auto b = solve_volterra(g, neg, Direction::backward, IntegralSign::plus);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(std::abs(a[i] - b[i]) < 1e-14);
    }
}

TEST_CASE("l1 norm") {
    CHECK(l1_norm(exponential(1.0, 1.0, 1e-3, 20.0)) == doctest::Approx(1.0 - std::exp(-20.0)).epsilon(1e-6));
}

}  // TEST_SUITE
