#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hmf/spectral_core.hpp"

using namespace hmf;

TEST_SUITE("spectral_core") {

TEST_CASE("grid layout") {
    const Grid g = make_grid(4, 24.0, 0.05, 20.0);
    CHECK(g.modes() == 9);
    CHECK(g.half_nodes == 480);
    CHECK(g.xi_count() == 961);
    CHECK(g.xi(0) == doctest::Approx(-24.0));
    CHECK(g.xi(480) == 0.0);
    CHECK(g.size() == 9 * 961);
}

TEST_CASE("grid rejects a horizon too close to the cutoff") {
    CHECK_THROWS_AS(make_grid(4, 23.9, 0.05, 20.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, 24.0, 0.05, 20.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(4, 24.0, 0.0, 20.0), std::invalid_argument);
}

TEST_CASE("cubic interpolation reproduces cubics away from the edges") {
    const Grid g = make_grid(2, 8.0, 0.1, 4.0);
    FourierField f(g);
    auto poly = [](double x) { return cplx(x * x * x - 2.0 * x + 1.0, 0.5 * x * x); };
    for (std::size_t j = 0; j < g.xi_count(); ++j) {
        f.at(2, j) = poly(g.xi(j));
    }
    for (double x : {-5.123, -0.01, 0.0, 0.37, 3.999}) {
        CHECK(std::abs(eval_shifted(f, 2, x) - poly(x)) < 1e-11);
    }
}

TEST_CASE("reads outside the window are zero and counted") {
    const Grid g = make_grid(2, 8.0, 0.1, 4.0);
    FourierField f(g);
    for (auto& c : f.coeffs()) {
        c = 1.0;
    }
    TruncationStats stats;
    CHECK(eval_shifted(f, 1, 8.5, &stats) == cplx{});
    CHECK(eval_shifted(f, 3, 0.0, &stats) == cplx{});
    CHECK(stats.out_of_range_reads >= 1);
}

TEST_CASE("shifted_row agrees with pointwise evaluation") {
    const Grid g = make_grid(3, 10.0, 0.05, 5.0);
    FourierField f(g);
    for (std::size_t j = 0; j < g.xi_count(); ++j) {
        const double x = g.xi(j);
        f.at(1, j) = cplx(std::exp(-x * x / 2), std::sin(x) * std::exp(-x * x / 3));
    }
    std::vector<cplx> out(g.xi_count());
    for (double shift : {0.0, 0.013, -1.7, 2.05}) {
        shifted_row(f, 1, shift, out);
        double err = 0.0;
        for (std::size_t j = 0; j < g.xi_count(); ++j) {
            err = std::max(err, std::abs(out[j] - eval_shifted(f, 1, g.xi(j) - shift)));
        }
        CHECK(err < 1e-14);
    }
}

TEST_CASE("enforce_reality is a projection") {
    const Grid g = make_grid(2, 6.0, 0.25, 2.0);
    FourierField f(g);
    std::mt19937 rng(7);
    std::normal_distribution<double> nd;
    for (auto& c : f.coeffs()) {
        c = {nd(rng), nd(rng)};
    }
    CHECK(reality_defect(f) > 0.1);
    const FourierField p = enforce_reality(f);
    CHECK(reality_defect(p) == 0.0);
    CHECK(sup_distance(enforce_reality(p), p) == 0.0);
}

TEST_CASE("sup_distance is a metric on coefficients") {
    const Grid g = make_grid(2, 6.0, 0.25, 2.0);
    FourierField a(g), b(g);
    a.at(1, 3) = {3.0, 4.0};
    CHECK(sup_distance(a, b) == doctest::Approx(5.0));
    CHECK(sup_distance(b, a) == doctest::Approx(5.0));
    CHECK(sup_distance(a, a) == 0.0);
    CHECK_THROWS_AS(sup_distance(a, FourierField(make_grid(2, 6.0, 0.5, 2.0))), std::invalid_argument);
}

TEST_CASE("inverse transform of a Gaussian pair") {
    // g_{+-1}(xi) = e^{-xi^2/2}  =>  g(x, v) = 2 cos(x) e^{-v^2/2} / sqrt(2 pi)
    const Grid g = make_grid(2, 12.0, 0.02, 2.0);
    FourierField f(g);
    for (int n : {-1, 1}) {
        for (std::size_t j = 0; j < g.xi_count(); ++j) {
            f.at(n, j) = std::exp(-0.5 * g.xi(j) * g.xi(j));
        }
    }
    const PhysicalSamples s = to_physical(f, 16, 21, 3.0);
    double err = 0.0;
    for (std::size_t ix = 0; ix < s.x.size(); ++ix) {
        for (std::size_t iv = 0; iv < s.v.size(); ++iv) {
            const double v = s.v[iv];
            const double exact = 2.0 * std::cos(s.x[ix]) * std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi);
            err = std::max(err, std::abs(s.at(ix, iv) - exact));
        }
    }
    CHECK(err < 1e-10);
    CHECK(s.max_imag_residue < 1e-12);
}

}  // TEST_SUITE
