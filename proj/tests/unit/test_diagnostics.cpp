#include <doctest.h>

#include <cmath>

#include "hmf/diagnostics.hpp"
#include "hmf/profiles.hpp"

using namespace hmf;

TEST_SUITE("diagnostics") {

TEST_CASE("exact exponential fit") {
    std::vector<double> t, y;
    for (int i = 0; i <= 200; ++i) {
        t.push_back(0.1 * i);
        y.push_back(2.0 * std::exp(-0.7 * 0.1 * i));
    }
    const DecayFit f = fit_decay(t, y, 5.0, 20.0);
    CHECK(f.rate == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(f.amplitude == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(f.residual < 1e-12);
    CHECK_FALSE(f.non_exponential());
    CHECK(f.used == 151);
}

TEST_CASE("gaussian decay is flagged non-exponential") {
    std::vector<double> t, y;
    for (int i = 0; i <= 200; ++i) {
        t.push_back(0.05 * i);
        y.push_back(std::exp(-0.5 * std::pow(0.05 * i, 2)));
    }
    CHECK(fit_decay(t, y, 5.0, 10.0).non_exponential());
}

TEST_CASE("degenerate windows") {
    std::vector<double> t{0, 1, 2, 3}, y{1, 1, 1, 1};
    CHECK_THROWS_AS(fit_decay(t, y, 0.0, 3.0), std::invalid_argument);
    std::vector<double> t2, y2;
    for (int i = 0; i < 40; ++i) {
        t2.push_back(i);
        y2.push_back(i % 2 ? 0.0 : 1.0);
    }
    CHECK_THROWS_AS(fit_decay(t2, y2, 0.0, 39.0), std::invalid_argument);
}

TEST_CASE("echo detection on an envelope with a bump") {
    FieldSeries z;
    for (int i = 0; i <= 1000; ++i) {
        const double t = 0.01 * i;
        const double bump = 1.0 + 3.0 * std::exp(-50.0 * (t - 6.0) * (t - 6.0));
        z.t.push_back(t);
        z.zeta1.push_back(std::exp(-t) * bump);
    }
    DecayFit fit;
    fit.rate = 1.0;
    fit.amplitude = 1.0;
    const auto ev = detect_echoes(z, fit, 1.5);
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].time == doctest::Approx(6.0).epsilon(1e-3));
    CHECK(ev[0].prominence == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("suite audit keeps the largest constants") {
    AuditReport a, b;
    a.M = 1.0;
    a.field_constant = 2.0;
    a.transport_constant = 0.5;
    b.M = 3.0;
    b.field_constant = 1.0;
    b.transport_constant = 4.0;
    const AuditReport s = audit_suite({a, b});
    CHECK(s.M == 3.0);
    CHECK(s.field_constant == 2.0);
    CHECK(s.transport_constant == 4.0);
    CHECK(s.finite);
}

TEST_CASE("audit of a backward run") {
    ScatteringConfig c;
    c.datum = make_asymptotic_datum(1.0, {{-1, 1.0}, {1, 1.0}}, 1.0, make_grid(4, 9.0, 0.05, 5.0));
    c.epsilon = 0.01;
    c.T = 5.0;
    const ScatteringResult r = backward_solve(c);
    const WeightFunction w = a_infinity(1e-3, 5.0, 0.01);
    AuditParams p{0.3, 1e-3, 0.01, analytic_norm(c.datum, 0.3).value, profile_norm(maxwellian(), 0.3), w.at_zero()};
    const AuditReport rep = audit_apriori(r.traj, r.traj.field, w, p);
    CHECK(rep.finite);
    CHECK(rep.M > 0.0);
    CHECK(rep.N > 0.0);
    p.a_inf0 = 0.5;
    CHECK_THROWS_AS(audit_apriori(r.traj, r.traj.field, w, p), std::invalid_argument);
}

TEST_CASE("regularity radius hits the cap") {
    const Grid g = make_grid(2, 12.0, 0.05, 4.0);
    Trajectory tr;
    tr.times = {0.0};
    tr.snapshots = {make_asymptotic_datum(1.0, {{-1, 1.0}, {1, 1.0}}, 1.0, g)};
    const RegularityProfile p = regularity_profile(tr, 10.0);
    REQUIRE(p.mu_star.size() == 1);
    CHECK(analytic_norm(tr.snapshots[0], p.mu_star[0]).value == doctest::Approx(10.0).epsilon(1e-6));
}

TEST_CASE("round trip of a converged backward run") {
    ScatteringConfig c;
    c.datum = make_asymptotic_datum(1.0, {{-1, 1.0}, {1, 1.0}}, 1.0, make_grid(4, 9.0, 0.05, 5.0));
    c.epsilon = 0.01;
    c.T = 5.0;
    const ScatteringResult r = backward_solve(c);
    const ComparisonReport rep = compare_backward_forward(r, c, 10.0);
    CHECK(rep.round_trip_limit == doctest::Approx(5e-6));
    CHECK(rep.round_trip_ok);
    CHECK(rep.backward.t.size() == r.traj.times.size());
}

}  // TEST_SUITE
