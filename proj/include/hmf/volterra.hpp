// Convolution Volterra machinery: Laplace transforms, the Penrose-type
// stability scan, resolvent kernels and second-kind solvers.
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hmf/spectral_core.hpp"

namespace hmf {

/// Samples j(i * d_t), i = 0 .. N, plus a decay certificate |j(t)| <= C e^{-rate t}.
struct KernelOnGrid {
    double d_t = 0.0;
    std::vector<cplx> values;
    double decay_rate = 0.0;
    double decay_constant = 0.0;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] double t_end() const noexcept {
        return values.empty() ? 0.0 : d_t * static_cast<double>(values.size() - 1);
    }
};

/// Samples j on [0, t_end]. The certificate constant is the sup of |j(t)| e^{rate t}
/// over a scan of [0, 4 t_end], inflated by 1%; a numerical certificate.
KernelOnGrid sample_kernel(const std::function<cplx(double)>& j, double d_t, double t_end, double decay_rate);

/// Pointwise product e^{-shift t} j(t), as used to pass to exponentially weighted unknowns.
KernelOnGrid damp_kernel(const KernelOnGrid& kernel, double shift);

struct LaplaceValue {
    cplx value;
    double error_bound = 0.0;  // quadrature estimate plus analytic tail bound
};

/// L[j](sigma) = int_0^inf e^{-sigma t} j(t) dt. Composite Simpson on the grid,
/// tail beyond t_end bounded with the decay certificate. Rejects Re(sigma) < 0.
LaplaceValue laplace(const KernelOnGrid& kernel, cplx sigma);

struct StabilityOptions {
    double threshold = 0.05;
    double critical_value = 1.0;  // scan |critical - L|; the resolvent theorem uses -1
    int interior_lines = 4;       // Re sigma lines in (0, decay_rate]
    std::optional<double> bound_M;  // sup |omega~_0| <= M pi^2
    double lambda = 0.0;            // analytic width paired with bound_M
};

struct StabilityReport {
    double margin = 0.0;
    cplx argmin_sigma{};
    bool satisfied = false;
    double omega_max = 0.0;
    int n_scan = 0;
    int interior_lines = 0;
    double critical_value = 1.0;
    double max_abs_laplace = 0.0;
    double value_at_zero_re = 0.0;
    int winding = 0;  // turns of critical - L along the imaginary axis; nonzero: a root with Re sigma > 0
    std::optional<double> sufficient_bound;  // pi^2 M / lambda^2
    bool sufficient_satisfied = false;
};

/// Scans sigma = i w, w in [-omega_max, omega_max] on n_scan nodes, plus a
/// coarse grid of interior lines. Satisfied needs margin > threshold and zero
/// winding. Throws if omega_max is too small for the integration-by-parts bound
/// |L(i w)| <= V/|w| to drop below 1/2.
StabilityReport stability_margin(const KernelOnGrid& kernel, double omega_max, int n_scan,
                                 const StabilityOptions& options = {});

struct ResolventResult {
    KernelOnGrid kernel;
    double l1_norm = 0.0;
    bool bounded = true;  // false when ||r||_1 exceeded the cap
};

/// Solves r + j * r = j by trapezoidal forward substitution.
ResolventResult resolvent(const KernelOnGrid& kernel, double l1_cap = 1e6);

enum class Direction { forward, backward };

/// Sign of the integral term: zeta = g + sign * int kernel zeta.
enum class IntegralSign { plus = 1, minus = -1 };

/// Trapezoidal second-kind solver.
///   forward:  z(t_m) = g(t_m) + s * int_0^{t_m} k(t_m - s') z(s') ds'
///   backward: z(t_m) = g(t_m) + s * int_{t_m}^{T} k(s' - t_m) z(s') ds'
/// The kernel is indexed by lag and must cover the forcing's span.
std::vector<cplx> solve_volterra(std::span<const cplx> forcing, const KernelOnGrid& kernel, Direction direction,
                                 IntegralSign sign = IntegralSign::plus);

/// Trapezoidal solves at d_t and d_t/2 combined by Richardson extrapolation.
/// forcing_fine must be sampled at d_t/2 (2N+1 samples for N coarse steps);
/// kernel_fine at d_t/2 as well. Returns values on the coarse d_t nodes.
std::vector<cplx> solve_volterra_extrapolated(std::span<const cplx> forcing_fine, const KernelOnGrid& kernel_fine,
                                              Direction direction, IntegralSign sign = IntegralSign::plus);

/// Discrete L1 norm (trapezoid) of kernel values.
double l1_norm(const KernelOnGrid& kernel);

}  // namespace hmf
