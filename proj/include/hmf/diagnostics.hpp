// Decay fits, echo detection, a-priori inequality audits and the
// backward-versus-forward comparison.
#pragma once

#include <vector>

#include "hmf/evolution.hpp"
#include "hmf/norms.hpp"
#include "hmf/scattering.hpp"

namespace hmf {

struct DecayFit {
    double rate = 0.0;       // lambda_fit in y ~ A e^{-lambda t}
    double amplitude = 0.0;  // A
    double residual = 0.0;   // RMS of the log-linear residuals
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::size_t used = 0;

    /// Residual above 0.1 marks a non-exponential series.
    [[nodiscard]] bool non_exponential() const noexcept { return residual > 0.1; }
};

/// Least squares of log y against t over [t_lo, t_hi]. Zeros are excluded; throws
/// std::invalid_argument if fewer than 80% of window nodes are usable or fewer than 10 remain.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& y, double t_lo, double t_hi);

/// fit_decay on |zeta_1|.
DecayFit fit_decay(const FieldSeries& zeta, double t_lo, double t_hi);

struct EchoEvent {
    double time = 0.0;
    double prominence = 0.0;  // |zeta_1| relative to the fitted envelope
};

/// Local maxima of |zeta_1(t)| e^{rate t} / A over a sliding window of half-width
/// half_window that exceed threshold.
std::vector<EchoEvent> detect_echoes(const FieldSeries& zeta, const DecayFit& fit, double threshold,
                                     double half_window = 1.0);

struct AuditParams {
    double lambda = 0.3;
    double delta = 1e-3;
    double epsilon = 0.0;
    double datum_norm = 0.0;  // ||h_inf||_lambda
    double eta_norm = 0.0;    // ||eta||_lambda
    double a_inf0 = 0.0;      // a_inf,delta(0)
};

struct AuditReport {
    double M = 0.0;
    double N = 0.0;
    double field_constant = 0.0;      // smallest C with M <= C ||h_inf|| + eps C M N / (lambda^2 sqrt(lambda - a_inf(0)))
    double transport_constant = 0.0;  // smallest C with N <= C ||h_inf|| + (C/delta) M ||eta|| + eps (C/delta) M N
    bool finite = true;
};

/// Evaluates both sides of the field and transport estimates on one run.
AuditReport audit_apriori(const Trajectory& traj, const FieldSeries& zeta, const WeightFunction& weight,
                          const AuditParams& params);

/// Largest per-run constants: the smallest constants valid across the whole suite.
AuditReport audit_suite(const std::vector<AuditReport>& runs);

struct RegularityProfile {
    std::vector<double> t;
    std::vector<double> mu_star;  // largest mu with ||h(t)||_mu < cap
    int increases = 0;            // consecutive steps with mu_star rising by more than the tolerance
    int decreases = 0;
};

/// mu_star per snapshot by bisection on [0, mu_hi].
RegularityProfile regularity_profile(const Trajectory& traj, double cap, double mu_hi = 20.0, double tol = 1e-6);

struct ComparisonReport {
    double round_trip_error = 0.0;  // sup |forward(h(tau)) at T - h(T)|
    double round_trip_limit = 0.0;  // 5 x Picard tolerance
    bool round_trip_ok = false;
    RegularityProfile backward;
    RegularityProfile forward;
    bool backward_nondecreasing = false;
    bool forward_nonincreasing = false;
};

/// Round trip and regularity profiles. rough, when non-empty, seeds the forward
/// profile; otherwise the forward profile is that of the round-trip run.
ComparisonReport compare_backward_forward(const ScatteringResult& backward, const ScatteringConfig& config,
                                          double cap, const FourierField* rough = nullptr);

}  // namespace hmf
