// Backward (scattering) problem: Picard iteration between the field equation
// and the linear transport equation with a terminal datum, continuation in T,
// and the non-perturbative variant on a window [tau, T].
#pragma once

#include <string>
#include <vector>

#include "hmf/evolution.hpp"
#include "hmf/profiles.hpp"
#include "hmf/spectral_core.hpp"

namespace hmf {

struct PicardOptions {
    int max_iters = 30;
    double tol = 1e-6;
    double divergence_factor = 1e3;  // diff growing past this times the first diff aborts
};

struct ScatteringConfig {
    FourierField datum;  // h_inf, or omega - omega_bar
    Profile background = maxwellian();
    double epsilon = 0.0;
    double sign = 1.0;
    double T = 20.0;
    double tau = 0.0;
    double d_t = 0.01;
    int snapshot_every = 10;
    PicardOptions picard;
    double lambda = 0.3;            // for the M diagnostic in the trace
    bool require_stability = true;  // scan L[j_1] before iterating
};

/// Throws std::invalid_argument on violated preconditions.
void validate(const ScatteringConfig& config);

struct PicardStep {
    int iter = 0;
    double zeta_diff = 0.0;  // sup over time of |zeta^{(j)} - zeta^{(j-1)}|
    double h_diff = 0.0;     // sup over snapshots of |h^{(j+1)} - h^{(j)}|
    double sup_diff = 0.0;   // max of the two
    double ratio = 0.0;      // sup_diff / previous sup_diff; NaN on the first step
    double M = 0.0;          // functional_M of the read-out field at config.lambda
};

struct PicardTrace {
    std::vector<PicardStep> steps;
    bool converged = false;
    bool diverged = false;
    std::string stop_reason;

    [[nodiscard]] int iterations() const noexcept { return static_cast<int>(steps.size()); }
    /// Largest ratio over steps 2.., or 0 when there are fewer than two steps.
    [[nodiscard]] double max_ratio_after_first() const;
};

struct ScatteringResult {
    Trajectory traj;          // h on [tau, T]; field = zeta_1 read out from h at each node
    FieldSeries volterra;     // zeta_1 from the last field solve, on the d_t nodes
    std::vector<cplx> b1;     // int_t^T zeta_1(s) h_0(s, t - s)(t - s) ds on the d_t nodes
    std::vector<cplx> bm1;    // -int_t^T zeta_{-1}(s) h_2(s, t + s)(t - s) ds
    PicardTrace trace;
    double stability_margin = 0.0;
};

/// Picard iteration from h^{(0)} = datum.
ScatteringResult backward_solve(const ScatteringConfig& config);

/// Same machinery with epsilon = 1 on [tau, T]; the datum is omega - omega_bar.
ScatteringResult nonperturbative_solve(ScatteringConfig config);

/// Max over a coarse (s, xi) sample of |h_0(s, xi) - h_inf,0(xi) - eps s_f sum_k (k/2) xi int_s^T zeta_k h_{-k}(l, xi - k l) dl|,
/// relative to max |h_0|. The l-integral uses the snapshots (trapezoid).
double zero_mode_identity_defect(const ScatteringResult& result, const ScatteringConfig& config);

struct ContinuationPair {
    double T_short = 0.0;
    double T_long = 0.0;
    double zeta_diff = 0.0;  // sup over [tau, T_short]
    double h_diff = 0.0;     // sup over common snapshots in [tau, T_short]
};

struct ContinuationResult {
    std::vector<double> horizons;
    std::vector<ScatteringResult> runs;
    std::vector<ContinuationPair> pairs;
};

/// Solves for each T (sorted) and compares consecutive solutions on the shorter window.
ContinuationResult continue_in_T(const ScatteringConfig& config, const std::vector<double>& T_list);

}  // namespace hmf
