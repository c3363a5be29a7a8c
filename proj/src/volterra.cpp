#include "hmf/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hmf {

namespace {

// Composite Simpson of e^{-sigma t_i} j_i over nodes [0, last] with stride.
// last / stride must be even.
cplx simpson(const KernelOnGrid& kernel, cplx sigma, std::size_t last, std::size_t stride) {
    const double h = kernel.d_t * static_cast<double>(stride);
    cplx acc{};
    const std::size_t steps = last / stride;
    constexpr std::size_t kResync = 512;
    const cplx factor = std::exp(-sigma * h);
    cplx phase{1.0, 0.0};
    for (std::size_t k = 0; k <= steps; ++k) {
        if (k % kResync == 0) {
            phase = std::exp(-sigma * (h * static_cast<double>(k)));
        }
        const double w = (k == 0 || k == steps) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        acc += w * phase * kernel.values[k * stride];
        phase *= factor;
    }
    return acc * (h / 3.0);
}

double total_variation_bound(const KernelOnGrid& kernel) {
    double v = kernel.values.empty() ? 0.0 : std::abs(kernel.values.front());
    for (std::size_t i = 1; i < kernel.values.size(); ++i) {
        v += std::abs(kernel.values[i] - kernel.values[i - 1]);
    }
    return v;
}

}  // namespace

KernelOnGrid sample_kernel(const std::function<cplx(double)>& j, double d_t, double t_end, double decay_rate) {
    if (!(d_t > 0.0) || !(t_end >= 0.0)) {
        throw std::invalid_argument("sample_kernel: need d_t > 0 and t_end >= 0");
    }
    KernelOnGrid k;
    k.d_t = d_t;
    k.decay_rate = decay_rate;
    const auto n = static_cast<std::size_t>(std::llround(t_end / d_t));
    k.values.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        k.values[i] = j(d_t * static_cast<double>(i));
    }
    double c = 0.0;
    const double scan_end = std::max(4.0 * t_end, 1.0);
    const int scan = 40000;
    for (int i = 0; i <= scan; ++i) {
        const double t = scan_end * i / scan;
        c = std::max(c, std::abs(j(t)) * std::exp(decay_rate * t));
    }
    k.decay_constant = 1.01 * c;
    return k;
}

KernelOnGrid damp_kernel(const KernelOnGrid& kernel, double shift) {
    KernelOnGrid out = kernel;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.values[i] *= std::exp(-shift * kernel.d_t * static_cast<double>(i));
    }
    out.decay_rate = kernel.decay_rate + shift;
    return out;
}

LaplaceValue laplace(const KernelOnGrid& kernel, cplx sigma) {
    if (sigma.real() < 0.0) {
        throw std::invalid_argument("laplace: Re(sigma) must be >= 0");
    }
    if (kernel.values.size() < 5) {
        throw std::invalid_argument("laplace: kernel needs at least 5 samples");
    }
    const std::size_t n = kernel.values.size() - 1;
    const std::size_t last = (n / 4) * 4;
    const cplx fine = simpson(kernel, sigma, last, 1);
    const cplx coarse = simpson(kernel, sigma, last, 2);
    const double t_cut = kernel.d_t * static_cast<double>(last);
    const double rate = kernel.decay_rate + sigma.real();
    double tail = 0.0;
    if (rate > 0.0) {
        tail = kernel.decay_constant * std::exp(-rate * t_cut) / rate;
    } else {
        tail = std::numeric_limits<double>::infinity();
    }
    return {fine, std::abs(fine - coarse) / 15.0 + tail};
}

StabilityReport stability_margin(const KernelOnGrid& kernel, double omega_max, int n_scan,
                                 const StabilityOptions& options) {
    if (n_scan < 2) {
        throw std::invalid_argument("stability_margin: n_scan must be >= 2");
    }
    const double variation = total_variation_bound(kernel);
    if (omega_max < 2.0 * variation) {
        throw std::invalid_argument("stability_margin: omega_max = " + std::to_string(omega_max) +
                                    " is below 2 * total variation of the kernel (" +
                                    std::to_string(2.0 * variation) + "); |L| is not yet < 1/2 there");
    }

    StabilityReport rep;
    rep.omega_max = omega_max;
    rep.n_scan = n_scan;
    rep.critical_value = options.critical_value;
    rep.margin = std::numeric_limits<double>::infinity();

    auto visit = [&](cplx sigma) {
        const cplx l = laplace(kernel, sigma).value;
        const double d = std::abs(options.critical_value - l);
        rep.max_abs_laplace = std::max(rep.max_abs_laplace, std::abs(l));
        if (d < rep.margin) {
            rep.margin = d;
            rep.argmin_sigma = sigma;
        }
        return options.critical_value - l;
    };

    // Winding of critical - L along the scanned axis. Beyond omega_max and on the closing
    // arc |L| < 1/2, so the endpoints join without turning around the origin.
    double turn = 0.0;
    cplx first{};
    cplx prev{};
    for (int i = 0; i < n_scan; ++i) {
        const double w = -omega_max + 2.0 * omega_max * i / (n_scan - 1);
        const cplx f = visit({0.0, w});
        if (i == 0) {
            first = f;
        } else {
            turn += std::arg(f / prev);
        }
        prev = f;
    }
    turn += std::arg(first / prev);
    rep.winding = static_cast<int>(std::lround(turn / (2.0 * M_PI)));
    const int coarse = std::max(2, n_scan / 4);
    rep.interior_lines = kernel.decay_rate > 0.0 ? options.interior_lines : 0;
    for (int line = 1; line <= rep.interior_lines; ++line) {
        const double re = kernel.decay_rate * line / options.interior_lines;
        for (int i = 0; i < coarse; ++i) {
            const double w = -omega_max + 2.0 * omega_max * i / (coarse - 1);
            visit({re, w});
        }
    }
    rep.value_at_zero_re = laplace(kernel, {0.0, 0.0}).value.real();
    rep.satisfied = rep.margin > options.threshold && rep.winding == 0;

    if (options.bound_M) {
        if (!(options.lambda > 0.0)) {
            throw std::invalid_argument("stability_margin: bound_M needs lambda > 0");
        }
        const double pi2 = M_PI * M_PI;
        rep.sufficient_bound = pi2 * *options.bound_M / (options.lambda * options.lambda);
        rep.sufficient_satisfied = *rep.sufficient_bound < 1.0;
    }
    return rep;
}

ResolventResult resolvent(const KernelOnGrid& kernel, double l1_cap) {
    ResolventResult res;
    res.kernel = kernel;
    const auto& j = kernel.values;
    auto& r = res.kernel.values;
    const std::size_t n = j.size();
    if (n == 0) {
        return res;
    }
    const double h = kernel.d_t;
    const cplx diag = 1.0 + 0.5 * h * j[0];
    if (std::abs(diag) < 1e-8) {
        throw std::domain_error("resolvent: degenerate diagonal 1 + (d_t/2) j(0)");
    }
    r[0] = j[0];
    double l1 = 0.5 * h * std::abs(r[0]);
    for (std::size_t m = 1; m < n; ++m) {
        cplx acc = 0.5 * j[m] * r[0];
        for (std::size_t i = 1; i < m; ++i) {
            acc += j[m - i] * r[i];
        }
        r[m] = (j[m] - h * acc) / diag;
        l1 += h * std::abs(r[m]);
        if (!(l1 <= l1_cap)) {
            res.bounded = false;
            r.resize(m + 1);
            break;
        }
    }
    res.l1_norm = l1_norm(res.kernel);
    return res;
}

std::vector<cplx> solve_volterra(std::span<const cplx> forcing, const KernelOnGrid& kernel, Direction direction,
                                 IntegralSign sign) {
    const std::size_t n = forcing.size();
    if (kernel.values.size() < n) {
        throw std::invalid_argument("solve_volterra: kernel shorter than forcing (" +
                                    std::to_string(kernel.values.size()) + " < " + std::to_string(n) + ")");
    }
    std::vector<cplx> z(n);
    if (n == 0) {
        return z;
    }
    const double s = sign == IntegralSign::plus ? 1.0 : -1.0;
    const double h = kernel.d_t;
    const auto& k = kernel.values;
    const cplx diag = 1.0 - 0.5 * s * h * k[0];
    if (std::abs(diag) < 1e-8) {
        throw std::domain_error("solve_volterra: degenerate step, |1 - (d_t/2) k(0)| < 1e-8");
    }

    // March from the known end; the backward problem is the forward one in reversed time.
    std::vector<cplx> g(forcing.begin(), forcing.end());
    if (direction == Direction::backward) {
        std::reverse(g.begin(), g.end());
    }
    z[0] = g[0];
    for (std::size_t m = 1; m < n; ++m) {
        cplx acc = 0.5 * k[m] * z[0];
        for (std::size_t i = 1; i < m; ++i) {
            acc += k[m - i] * z[i];
        }
        z[m] = (g[m] + s * h * acc) / diag;
    }
    if (direction == Direction::backward) {
        std::reverse(z.begin(), z.end());
    }
    return z;
}

std::vector<cplx> solve_volterra_extrapolated(std::span<const cplx> forcing_fine, const KernelOnGrid& kernel_fine,
                                              Direction direction, IntegralSign sign) {
    if (forcing_fine.size() % 2 == 0) {
        throw std::invalid_argument("solve_volterra_extrapolated: need an odd number of fine samples");
    }
    const std::size_t coarse_n = forcing_fine.size() / 2 + 1;
    const auto fine = solve_volterra(forcing_fine, kernel_fine, direction, sign);

    KernelOnGrid kernel_coarse;
    kernel_coarse.d_t = 2.0 * kernel_fine.d_t;
    kernel_coarse.decay_rate = kernel_fine.decay_rate;
    kernel_coarse.decay_constant = kernel_fine.decay_constant;
    kernel_coarse.values.resize((kernel_fine.values.size() + 1) / 2);
    for (std::size_t i = 0; i < kernel_coarse.values.size(); ++i) {
        kernel_coarse.values[i] = kernel_fine.values[2 * i];
    }
    std::vector<cplx> forcing_coarse(coarse_n);
    for (std::size_t i = 0; i < coarse_n; ++i) {
        forcing_coarse[i] = forcing_fine[2 * i];
    }
    const auto coarse = solve_volterra(forcing_coarse, kernel_coarse, direction, sign);

    std::vector<cplx> out(coarse_n);
    for (std::size_t i = 0; i < coarse_n; ++i) {
        out[i] = (4.0 * fine[2 * i] - coarse[i]) / 3.0;
    }
    return out;
}

double l1_norm(const KernelOnGrid& kernel) {
    const auto& v = kernel.values;
    if (v.size() < 2) {
        return 0.0;
    }
    double acc = 0.5 * (std::abs(v.front()) + std::abs(v.back()));
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        acc += std::abs(v[i]);
    }
    return acc * kernel.d_t;
}

}  // namespace hmf
