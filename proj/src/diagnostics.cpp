#include "hmf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hmf/norms.hpp"

namespace hmf {

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& y, double t_lo, double t_hi) {
    if (t.size() != y.size()) {
        throw std::invalid_argument("fit_decay: t and y differ in length");
    }
    std::size_t in_window = 0;
    std::vector<double> xs;
    std::vector<double> ls;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo - 1e-12 || t[i] > t_hi + 1e-12) {
            continue;
        }
        ++in_window;
        if (y[i] > 0.0 && std::isfinite(y[i])) {
            xs.push_back(t[i]);
            ls.push_back(std::log(y[i]));
        }
    }
    if (xs.size() < 10) {
        throw std::invalid_argument("fit_decay: degenerate window [" + std::to_string(t_lo) + ", " +
                                    std::to_string(t_hi) + "] with " + std::to_string(xs.size()) + " usable nodes");
    }
    if (static_cast<double>(xs.size()) < 0.8 * static_cast<double>(in_window)) {
        throw std::invalid_argument("fit_decay: fewer than 80% of window nodes are nonzero");
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double ml = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        ml += ls[i];
    }
    mx /= n;
    ml /= n;
    double sxx = 0.0;
    double sxl = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxl += (xs[i] - mx) * (ls[i] - ml);
    }
    const double slope = sxl / sxx;
    const double intercept = ml - slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ls[i] - (intercept + slope * xs[i]);
        ss += r * r;
    }
    DecayFit fit;
    fit.rate = -slope;
    fit.amplitude = std::exp(intercept);
    fit.residual = std::sqrt(ss / n);
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    fit.used = xs.size();
    return fit;
}

DecayFit fit_decay(const FieldSeries& zeta, double t_lo, double t_hi) {
    std::vector<double> y(zeta.size());
    for (std::size_t i = 0; i < zeta.size(); ++i) {
        y[i] = std::abs(zeta.zeta1[i]);
    }
    return fit_decay(zeta.t, y, t_lo, t_hi);
}

std::vector<EchoEvent> detect_echoes(const FieldSeries& zeta, const DecayFit& fit, double threshold,
                                     double half_window) {
    std::vector<EchoEvent> events;
    const std::size_t n = zeta.size();
    if (n < 3 || !(fit.amplitude > 0.0)) {
        return events;
    }
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = std::abs(zeta.zeta1[i]) * std::exp(fit.rate * zeta.t[i]) / fit.amplitude;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(u[i] > threshold)) {
            continue;
        }
        bool peak = true;
        for (std::size_t k = i; k-- > 0 && zeta.t[i] - zeta.t[k] <= half_window;) {
            if (u[k] >= u[i]) {
                peak = false;
                break;
            }
        }
        for (std::size_t k = i + 1; peak && k < n && zeta.t[k] - zeta.t[i] <= half_window; ++k) {
            if (u[k] > u[i]) {
                peak = false;
            }
        }
        if (peak) {
            events.push_back({zeta.t[i], u[i]});
        }
    }
    return events;
}

AuditReport audit_apriori(const Trajectory& traj, const FieldSeries& zeta, const WeightFunction& weight,
                          const AuditParams& params) {
    AuditReport rep;
    rep.M = functional_M(zeta, params.lambda).value;
    rep.N = functional_N(traj, params.lambda, weight).value;
    const double gap = params.lambda - params.a_inf0;
    if (!(gap > 0.0)) {
        throw std::invalid_argument("audit_apriori: need lambda > a_inf(0)");
    }
    const double field_rhs =
        params.datum_norm + params.epsilon * rep.M * rep.N / (params.lambda * params.lambda * std::sqrt(gap));
    const double transport_rhs = params.datum_norm + rep.M * params.eta_norm / params.delta +
                                 params.epsilon * rep.M * rep.N / params.delta;
    rep.field_constant = rep.M == 0.0 ? 0.0 : rep.M / field_rhs;
    rep.transport_constant = rep.N == 0.0 ? 0.0 : rep.N / transport_rhs;
    rep.finite = std::isfinite(rep.field_constant) && std::isfinite(rep.transport_constant);
    return rep;
}

AuditReport audit_suite(const std::vector<AuditReport>& runs) {
    AuditReport out;
    for (const auto& r : runs) {
        out.M = std::max(out.M, r.M);
        out.N = std::max(out.N, r.N);
        out.field_constant = std::max(out.field_constant, r.field_constant);
        out.transport_constant = std::max(out.transport_constant, r.transport_constant);
        out.finite = out.finite && r.finite;
    }
    return out;
}

RegularityProfile regularity_profile(const Trajectory& traj, double cap, double mu_hi, double tol) {
    RegularityProfile prof;
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        const auto& f = traj.snapshots[s];
        double mu_star = 0.0;
        if (analytic_norm(f, 0.0).value < cap) {
            if (analytic_norm(f, mu_hi).value < cap) {
                mu_star = mu_hi;
            } else {
                double lo = 0.0;
                double hi = mu_hi;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (analytic_norm(f, mid).value < cap ? lo : hi) = mid;
                }
                mu_star = lo;
            }
        }
        prof.t.push_back(traj.times[s]);
        prof.mu_star.push_back(mu_star);
    }
    for (std::size_t i = 1; i < prof.mu_star.size(); ++i) {
        const double d = prof.mu_star[i] - prof.mu_star[i - 1];
        if (d > tol) {
            ++prof.increases;
        } else if (d < -tol) {
            ++prof.decreases;
        }
    }
    return prof;
}

ComparisonReport compare_backward_forward(const ScatteringResult& backward, const ScatteringConfig& config,
                                          double cap, const FourierField* rough) {
    ComparisonReport rep;
    if (backward.traj.empty()) {
        throw std::invalid_argument("compare_backward_forward: empty backward trajectory");
    }
    EvolutionParams params;
    params.epsilon = config.epsilon;
    params.sign = config.sign;
    params.d_t = config.d_t;
    params.t_start = config.tau;
    params.t_final = config.T - config.tau;
    params.profile = config.background;
    params.snapshot_every = config.snapshot_every;
    const Trajectory fwd = forward_solve(backward.traj.front(), params);
    rep.round_trip_error = sup_distance(fwd.back(), backward.traj.back());
    rep.round_trip_limit = 5.0 * config.picard.tol;
    rep.round_trip_ok = rep.round_trip_error <= rep.round_trip_limit;

    rep.backward = regularity_profile(backward.traj, cap);
    if (rough != nullptr) {
        rep.forward = regularity_profile(forward_solve(*rough, params), cap);
    } else {
        rep.forward = regularity_profile(fwd, cap);
    }
    rep.backward_nondecreasing = rep.backward.decreases == 0;
    rep.forward_nonincreasing = rep.forward.increases == 0;
    return rep;
}

}  // namespace hmf
