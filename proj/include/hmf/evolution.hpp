// Fourier-space right-hand side, field read-out and the forward Cauchy solver.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hmf/profiles.hpp"
#include "hmf/spectral_core.hpp"

namespace hmf {

struct EvolutionParams {
    double epsilon = 0.0;
    double sign = 1.0;  // +1 repulsive, -1 attractive
    double d_t = 0.01;
    double t_start = 0.0;
    double t_final = 0.0;  // length of the run
    Profile profile = maxwellian();
    int snapshot_every = 10;
    double overflow_cap = 1e6;
};

/// Throws std::invalid_argument unless 0 < d_t <= 0.1, epsilon >= 0, sign = +-1
/// and t_final is a whole number of steps ending within the grid horizon.
void validate(const EvolutionParams& params, const Grid& grid);

/// zeta_1 and zeta_{-1} at one instant.
struct ZetaPair {
    cplx plus;
    cplx minus;
    double conjugation_defect = 0.0;  // |h_{-1}(-t) - conj(h_1(t))|
};

/// zeta_1(t) on a uniform time grid; zeta_{-1} is its conjugate.
struct FieldSeries {
    std::vector<double> t;
    std::vector<cplx> zeta1;

    [[nodiscard]] std::size_t size() const noexcept { return t.size(); }
    [[nodiscard]] cplx zeta_minus1(std::size_t i) const { return std::conj(zeta1[i]); }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<FourierField> snapshots;
    FieldSeries field;
    TruncationStats truncation;
    double mass_drift = 0.0;     // max |h_0(t, 0) - h_0(t_start, 0)|
    double reality_drift = 0.0;  // max reality_defect, sampled every 100 steps
    double conjugation_defect = 0.0;

    [[nodiscard]] bool empty() const noexcept { return snapshots.empty(); }
    [[nodiscard]] const FourierField& front() const { return snapshots.front(); }
    [[nodiscard]] const FourierField& back() const { return snapshots.back(); }
};

/// Coefficient growth past the overflow cap.
class BlowUp : public std::runtime_error {
public:
    BlowUp(double time, double value)
        : std::runtime_error("numerical blow-up at t = " + std::to_string(time) +
                             " (|coefficient| = " + std::to_string(value) + ")"),
          time_(time), value_(value) {}
    [[nodiscard]] double time() const noexcept { return time_; }
    [[nodiscard]] double value() const noexcept { return value_; }

private:
    double time_;
    double value_;
};

/// Time derivative of every coefficient:
///   d_t h_n(xi) = s [ delta_{n,+-1} n (i/2) zeta_n eta~'(xi - n t)
///                     - eps sum_{k=+-1} k (zeta_k / 2) h_{n-k}(xi - k t) (xi - n t) ].
FourierField rhs(const FourierField& state, double t, const ZetaPair& zeta, const EvolutionParams& params);

/// Same as rhs, writing into out (which must share the grid). scratch holds one row.
void rhs_into(const FourierField& state, double t, const ZetaPair& zeta, const EvolutionParams& params,
              FourierField& out, std::vector<cplx>& scratch);

/// zeta_1 = h_1(t, t) by interpolation, zeta_{-1} = conj(zeta_1).
ZetaPair extract_zeta(const FourierField& state, double t, TruncationStats* stats = nullptr);

/// Classical RK4 on [t_start, t_start + t_final] with zeta read from each stage state.
/// Throws BlowUp past the overflow cap.
Trajectory forward_solve(const FourierField& h0, const EvolutionParams& params);

}  // namespace hmf
