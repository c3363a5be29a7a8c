#include "hmf/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hmf {

namespace {

constexpr int kXNodes = 512;
constexpr double kUnbounded = 1e300;

// (1/2pi) int_0^{2pi} e^{kappa cos x} cos(n x) dx by the periodic trapezoid rule.
// Scaled by e^{-|kappa|} to stay finite for large kappa; the scale cancels in ratios.
double scaled_bessel_moment(double kappa, int n) {
    double acc = 0.0;
    for (int i = 0; i < kXNodes; ++i) {
        const double x = 2.0 * std::numbers::pi * i / kXNodes;
        acc += std::exp(kappa * std::cos(x) - std::abs(kappa)) * std::cos(n * x);
    }
    return acc / kXNodes;
}

}  // namespace

Profile maxwellian(double temperature) {
    if (!(temperature > 0.0)) {
        throw std::invalid_argument("maxwellian: temperature must be positive");
    }
    Profile p;
    p.name = temperature == 1.0 ? "maxwellian" : "maxwellian(T=" + std::to_string(temperature) + ")";
    p.eta_hat = [temperature](double xi) { return cplx{std::exp(-0.5 * temperature * xi * xi), 0.0}; };
    p.eta_prime_hat = [temperature](double xi) {
        return cplx{0.0, xi * std::exp(-0.5 * temperature * xi * xi)};
    };
    p.analytic_width = kUnbounded;
    return p;
}

std::function<cplx(double)> kernel_j(const Profile& profile, int n, double sign) {
    if (n != 1 && n != -1) {
        throw std::invalid_argument("kernel_j: n must be +1 or -1");
    }
    const auto eta_prime = profile.eta_prime_hat;
    const cplx factor{0.0, sign * 0.5 * n};
    return [eta_prime, factor, n](double t) { return factor * eta_prime(n * t); };
}

double profile_norm(const Profile& profile, double lambda, double xi_max) {
    auto weighted = [&](double xi) { return std::exp(lambda * std::sqrt(1.0 + xi * xi)) * std::abs(profile.eta_hat(xi)); };
    const int n = 20001;
    const double h = 2.0 * xi_max / (n - 1);
    double best = 0.0;
    double arg = 0.0;
    for (int i = 0; i < n; ++i) {
        const double xi = -xi_max + i * h;
        const double w = weighted(xi);
        if (w > best) {
            best = w;
            arg = xi;
        }
    }
    // Golden-section refinement on the bracketing cell pair.
    double a = arg - h;
    double b = arg + h;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 80; ++it) {
        const double c = b - gr * (b - a);
        const double d = a + gr * (b - a);
        if (weighted(c) > weighted(d)) {
            b = d;
        } else {
            a = c;
        }
    }
    return std::max(best, weighted(0.5 * (a + b)));
}

FourierField make_asymptotic_datum(double amplitude, const std::map<int, double>& mode_weights, double width,
                                   const Grid& grid) {
    DatumSpec spec;
    spec.amplitude = amplitude;
    spec.mode_weights = mode_weights;
    spec.width = width;
    return make_asymptotic_datum(spec, grid);
}

FourierField make_asymptotic_datum(const DatumSpec& spec, const Grid& grid) {
    if (!(spec.width > 0.0)) {
        throw std::invalid_argument("make_asymptotic_datum: width must be positive");
    }
    if (auto it = spec.mode_weights.find(0); it != spec.mode_weights.end() && it->second != 0.0) {
        throw std::invalid_argument("make_asymptotic_datum: the datum must be mean-zero (no weight on mode 0)");
    }
    auto shape = [&](double xi) {
        double acc = 0.0;
        for (double c : spec.bump_centers) {
            const double centers[2] = {c, -c};
            const int copies = c == 0.0 ? 1 : 2;
            for (int k = 0; k < copies; ++k) {
                const double z = (xi - centers[k]) / spec.width;
                acc += spec.shape == DatumShape::gaussian ? std::exp(-0.5 * z * z) : 1.0 / std::cosh(z);
            }
        }
        return acc;
    };
    FourierField field(grid);
    for (const auto& [n, w] : spec.mode_weights) {
        if (!field.has_mode(n) || w == 0.0) {
            continue;
        }
        auto row = field.row(n);
        for (std::size_t j = 0; j < row.size(); ++j) {
            row[j] = spec.amplitude * w * shape(grid.xi(j));
        }
    }
    return enforce_reality(field);
}

double omega_of_nu(double beta, double nu) {
    if (!(beta > 0.0)) {
        throw std::invalid_argument("omega_of_nu: beta must be positive");
    }
    const double kappa = beta * nu;
    return scaled_bessel_moment(kappa, 1) / scaled_bessel_moment(kappa, 0);
}

BGKState make_bgk_state(double beta, double nu) {
    BGKState s;
    s.beta = beta;
    s.nu = nu;
    const double kappa = beta * nu;
    // Z = (2pi I_0(beta nu)) * sqrt(2 pi / beta)
    s.normalizer = 2.0 * std::numbers::pi * scaled_bessel_moment(kappa, 0) * std::exp(std::abs(kappa)) *
                   std::sqrt(2.0 * std::numbers::pi / beta);
    s.residual = omega_of_nu(beta, nu) - nu;
    return s;
}

std::optional<BGKState> solve_bgk(double beta) {
    if (!(beta > 0.0)) {
        throw std::invalid_argument("solve_bgk: beta must be positive");
    }
    auto g = [beta](double nu) { return omega_of_nu(beta, nu) - nu; };
    const double lo0 = 1e-6;
    const double hi0 = 2.0;
    // Locate the first sign change on a scan; Omega_beta(nu)/nu is decreasing,
    // so in practice the sign at lo0 decides.
    const int scan = 400;
    double lo = lo0;
    double glo = g(lo);
    double hi = -1.0;
    for (int i = 1; i <= scan; ++i) {
        const double nu = lo0 + (hi0 - lo0) * i / scan;
        const double gv = g(nu);
        if ((glo > 0.0) != (gv > 0.0) || gv == 0.0) {
            hi = nu;
            break;
        }
        lo = nu;
        glo = gv;
    }
    if (hi < 0.0 || !(glo > 0.0)) {
        return std::nullopt;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double nu = std::abs(g(lo)) < std::abs(g(hi)) ? lo : hi;
    BGKState s = make_bgk_state(beta, nu);
    if (std::abs(s.residual) >= 1e-10) {
        return std::nullopt;
    }
    return s;
}

std::pair<FourierField, Profile> bgk_to_field(const BGKState& state, const Grid& grid) {
    const double beta = state.beta;
    const double kappa = beta * state.nu;
    const double m0 = scaled_bessel_moment(kappa, 0);

    // Velocity factor int e^{-iv xi} e^{-beta v^2/2} dv / int e^{-beta v^2/2} dv,
    // trapezoid on [-8/sqrt(beta), 8/sqrt(beta)].
    const double v_max = 8.0 / std::sqrt(beta);
    const int nv = 1601;
    const double hv = 2.0 * v_max / (nv - 1);
    double mass = 0.0;
    std::vector<double> weight(nv);
    std::vector<double> vel(nv);
    for (int i = 0; i < nv; ++i) {
        vel[i] = -v_max + i * hv;
        weight[i] = std::exp(-0.5 * beta * vel[i] * vel[i]) * ((i == 0 || i == nv - 1) ? 0.5 : 1.0);
        mass += weight[i];
    }
    std::vector<double> vfactor(grid.xi_count());
    for (std::size_t j = 0; j < grid.xi_count(); ++j) {
        const double xi = grid.xi(j);
        double acc = 0.0;
        for (int i = 0; i < nv; ++i) {
            acc += weight[i] * std::cos(vel[i] * xi);  // even integrand: the sine part vanishes
        }
        vfactor[j] = acc / mass;
    }

    FourierField field(grid);
    for (int n = -grid.n_max; n <= grid.n_max; ++n) {
        if (n == 0) {
            continue;  // the n = 0 mode is exactly omega_bar
        }
        const double xfactor = scaled_bessel_moment(kappa, n) / m0;
        auto row = field.row(n);
        for (std::size_t j = 0; j < row.size(); ++j) {
            row[j] = xfactor * vfactor[j];
        }
    }

    Profile background = maxwellian(1.0 / beta);
    background.name = "bgk_mean(beta=" + std::to_string(beta) + ")";
    return {enforce_reality(field), background};
}

}  // namespace hmf
