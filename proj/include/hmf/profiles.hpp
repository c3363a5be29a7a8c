// Homogeneous backgrounds, asymptotic data and BGK equilibria.
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hmf/spectral_core.hpp"

namespace hmf {

/// A spatially homogeneous state eta(v), carried by its velocity transform
/// eta~(xi) = int e^{-iv xi} eta(v) dv, normalized so that eta~(0) = 1.
struct Profile {
    std::string name;
    std::function<cplx(double)> eta_hat;
    std::function<cplx(double)> eta_prime_hat;  // transform of eta', equals i xi eta~(xi)
    double analytic_width = 0.0;                // largest lambda with ||eta||_lambda < inf (inf encoded as 1e300)
};

/// e^{-v^2 / (2 theta)} / sqrt(2 pi theta); eta~(xi) = e^{-theta xi^2 / 2}.
Profile maxwellian(double temperature = 1.0);

/// j_n(t) = sign * i (n/2) eta~'(n t), n = +-1. sign = -1 is the attractive force.
std::function<cplx(double)> kernel_j(const Profile& profile, int n, double sign = 1.0);

/// sup_xi e^{lambda <0, xi>} |eta~(xi)|, by a dense scan refined around the maximizer.
double profile_norm(const Profile& profile, double lambda, double xi_max = 200.0);

enum class DatumShape { gaussian, sech };

struct DatumSpec {
    double amplitude = 1.0;
    std::map<int, double> mode_weights{{-1, 1.0}, {1, 1.0}};
    double width = 1.0;
    DatumShape shape = DatumShape::gaussian;
    std::vector<double> bump_centers{0.0};  // profile is summed over +-center pairs
};

/// h_inf,n(xi) = amplitude * weight_n * e^{-xi^2 / (2 width^2)}, symmetrized.
FourierField make_asymptotic_datum(double amplitude, const std::map<int, double>& mode_weights, double width,
                                   const Grid& grid);
FourierField make_asymptotic_datum(const DatumSpec& spec, const Grid& grid);

/// Omega_beta(nu) = int omega_{beta,nu} cos x dx dv for the probability-normalized
/// BGK density. The velocity factor cancels; x-integrals use a 512-node trapezoid.
double omega_of_nu(double beta, double nu);

struct BGKState {
    double beta = 0.0;
    double nu = 0.0;
    double normalizer = 0.0;  // Z = int int e^{-beta H_nu} dx dv
    double residual = 0.0;    // Omega_beta(nu) - nu
};

/// Bisection for Omega_beta(nu) = nu on (1e-6, 2]. Empty when no sign change exists,
/// which is the expected answer for beta < 2.
std::optional<BGKState> solve_bgk(double beta);

/// BGKState at a given (beta, nu), without the fixed-point condition.
BGKState make_bgk_state(double beta, double nu);

/// Mean-zero part omega - omega_bar as a field, and omega_bar as a profile.
/// The state is rescaled so that omega_bar carries unit velocity mass.
std::pair<FourierField, Profile> bgk_to_field(const BGKState& state, const Grid& grid);

}  // namespace hmf
