// Analytic norms, the regularity-loss weight a_{T,delta} and the weighted
// functionals M, N (backward), P, Q (non-perturbative) and J, K (forward).
#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "hmf/evolution.hpp"
#include "hmf/spectral_core.hpp"

namespace hmf {

/// <n, xi> = (1 + n^2 + xi^2)^{1/2}
inline double bracket(int n, double xi) noexcept { return std::sqrt(1.0 + n * n + xi * xi); }

/// <t> = (1 + t^2)^{1/2}
inline double bracket(double t) noexcept { return std::sqrt(1.0 + t * t); }

struct NormReport {
    double value = 0.0;
    int mode = 0;      // arg-sup over the field, when applicable
    double xi = 0.0;
    double mu = 0.0;   // arg-sup over the regularity parameter
    double t = 0.0;    // arg-sup over time
    bool empty_domain = false;
};

/// sup_{n,xi} e^{mu <n,xi>} |g_n(xi)|
NormReport analytic_norm(const FourierField& field, double mu);

/// sup_{n,xi} e^{lambda <n,xi>} <n,xi>^p |g_n(xi)|
NormReport weighted_norm_p(const FourierField& field, double lambda, int p);

struct WeightFunction {
    double T = 0.0;
    double delta = 0.0;
    double Delta = 1.0;  // multiplies a in theta = lambda - mu - Delta a
    double d_t = 0.0;
    std::vector<double> t;
    std::vector<double> a;

    /// Linear interpolation; clamps outside the grid.
    [[nodiscard]] double at(double time) const;
    [[nodiscard]] double at_zero() const { return a.front(); }
};

/// a' = -delta e^{-a t} (1 + t), a(T) = 0, by RK4 backward from T.
/// Throws std::runtime_error if positivity or monotonicity fails on [0, T).
WeightFunction solve_a(double T, double delta, double d_t);

struct AInfinityReport {
    WeightFunction weight;            // forward integration of a_inf on [0, t_max]
    double a0 = 0.0;                  // extrapolated a_inf(0)
    std::vector<double> horizons;     // the T triple used last
    std::vector<double> a0_at_T;      // a_{T,delta}(0) on that triple
    double consistency = 0.0;         // |a0 - extrapolation from the halved triple|
    int order = 0;                    // polynomial order in 1/T that was selected
    int retries = 0;
    bool positive = false;
};

/// a_inf(0) by extrapolation in 1/T over (2 T0, 4 T0, 8 T0), with the order (0 to 2)
/// chosen by agreement with (T0, 2 T0, 4 T0); then forward RK4 on [0, t_max].
/// A non-positive value triggers a retry with doubled horizons.
AInfinityReport a_infinity_report(double delta, double t_max, double d_t, double T0 = 50.0, int max_retries = 4);

/// Convenience: the weight of a_infinity_report.
WeightFunction a_infinity(double delta, double t_max, double d_t);

/// sup e^{lambda t} |zeta_1(t)| over t in [t_lo, t_hi].
NormReport functional_M(const FieldSeries& zeta, double lambda,
                        double t_lo = -std::numeric_limits<double>::infinity(),
                        double t_hi = std::numeric_limits<double>::infinity());

/// sup over (mu, t) with mu >= 0 and alpha = lambda - mu - Delta a(t) > 0 of
/// alpha^{1/2} ||h(t)||_mu. mu is sampled on 64 points per snapshot, log-refined
/// toward alpha = 0, so the value is a lower bound on the true sup.
NormReport functional_N(const Trajectory& traj, double lambda, const WeightFunction& weight,
                        double t_lo = -std::numeric_limits<double>::infinity());

/// (J^p, K^{3,p+1}_q) with beta(lambda, t) = lambda0 - lambda - delta arctan t.
/// Requires delta < 2 lambda0 / pi, q >= 3, p >= q + 3.
std::pair<NormReport, NormReport> functional_J_K(const FieldSeries& zeta, const Trajectory& traj, double lambda0,
                                                 double delta, int p, int q);

/// (P, Q) on [tau, T]: P = sup e^{lambda t}|zeta_1|, Q as N with theta = lambda - mu - Delta a_T(t).
/// weight.Delta should be lambda' / a_inf(tau); see theta_weight.
std::pair<NormReport, NormReport> functional_P_Q(const FieldSeries& zeta, const Trajectory& traj, double lambda,
                                                 double lambda_prime, double tau, const WeightFunction& weight);

/// a_{T,delta} with Delta = lambda' / a_inf(tau).
WeightFunction theta_weight(double T, double delta, double d_t, double lambda_prime, double tau);

}  // namespace hmf
