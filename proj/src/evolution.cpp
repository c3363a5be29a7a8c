#include "hmf/evolution.hpp"

#include <algorithm>
#include <cmath>

namespace hmf {

namespace {

constexpr cplx kHalfI{0.0, 0.5};

std::size_t step_count(double t_final, double d_t) {
    const double steps = t_final / d_t;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps)) {
        throw std::invalid_argument("t_final = " + std::to_string(t_final) +
                                    " is not a whole number of steps d_t = " + std::to_string(d_t));
    }
    return static_cast<std::size_t>(rounded);
}

double boundary_max(const FourierField& f) {
    const Grid& g = f.grid();
    const std::size_t nx = g.xi_count();
    double m = 0.0;
    for (int n = -g.n_max; n <= g.n_max; ++n) {
        const auto row = f.row(n);
        m = std::max({m, std::abs(row[0]), std::abs(row[1]), std::abs(row[nx - 2]), std::abs(row[nx - 1])});
    }
    return m;
}

}  // namespace

void validate(const EvolutionParams& params, const Grid& grid) {
    if (!(params.d_t > 0.0) || params.d_t > 0.1) {
        throw std::invalid_argument("d_t must lie in (0, 0.1], got " + std::to_string(params.d_t));
    }
    if (!(params.epsilon >= 0.0)) {
        throw std::invalid_argument("epsilon must be >= 0");
    }
    if (params.sign != 1.0 && params.sign != -1.0) {
        throw std::invalid_argument("force sign must be +1 or -1");
    }
    if (!(params.t_start >= 0.0) || !(params.t_final >= 0.0) ||
        params.t_start + params.t_final > grid.t_final + 1e-12) {
        throw std::invalid_argument("run end " + std::to_string(params.t_start + params.t_final) +
                                    " exceeds the grid horizon " + std::to_string(grid.t_final));
    }
    if (params.snapshot_every < 1) {
        throw std::invalid_argument("snapshot_every must be >= 1");
    }
    if (!params.profile.eta_prime_hat) {
        throw std::invalid_argument("profile has no eta_prime_hat");
    }
    (void)step_count(params.t_final, params.d_t);
}

void rhs_into(const FourierField& state, double t, const ZetaPair& zeta, const EvolutionParams& params,
              FourierField& out, std::vector<cplx>& scratch) {
    const Grid& g = state.grid();
    const std::size_t nx = g.xi_count();
    scratch.resize(nx);
    const double s = params.sign;
    for (int n = -g.n_max; n <= g.n_max; ++n) {
        auto dst = out.row(n);
        std::fill(dst.begin(), dst.end(), cplx{});
        if (n == 1 || n == -1) {
            const cplx zn = n == 1 ? zeta.plus : zeta.minus;
            if (zn != cplx{}) {
                const cplx c = s * static_cast<double>(n) * kHalfI * zn;
                for (std::size_t j = 0; j < nx; ++j) {
                    dst[j] += c * params.profile.eta_prime_hat(g.xi(j) - n * t);
                }
            }
        }
        if (params.epsilon == 0.0) {
            continue;
        }
        for (int k : {-1, 1}) {
            const int m = n - k;
            const cplx zk = k == 1 ? zeta.plus : zeta.minus;
            if (!state.has_mode(m) || zk == cplx{}) {
                continue;
            }
            shifted_row(state, m, k * t, scratch);
            const cplx c = -s * params.epsilon * static_cast<double>(k) * 0.5 * zk;
            for (std::size_t j = 0; j < nx; ++j) {
                dst[j] += c * scratch[j] * (g.xi(j) - n * t);
            }
        }
    }
}

FourierField rhs(const FourierField& state, double t, const ZetaPair& zeta, const EvolutionParams& params) {
    FourierField out(state.grid());
    std::vector<cplx> scratch;
    rhs_into(state, t, zeta, params, out, scratch);
    return out;
}

ZetaPair extract_zeta(const FourierField& state, double t, TruncationStats* stats) {
    ZetaPair z;
    z.plus = eval_shifted(state, 1, t, stats);
    z.minus = std::conj(z.plus);
    z.conjugation_defect = std::abs(eval_shifted(state, -1, -t) - z.minus);
    return z;
}

Trajectory forward_solve(const FourierField& h0, const EvolutionParams& params) {
    const Grid& g = h0.grid();
    validate(params, g);
    const std::size_t steps = step_count(params.t_final, params.d_t);
    const double dt = params.d_t;
    const std::size_t zero = static_cast<std::size_t>(g.half_nodes);

    Trajectory traj;
    traj.field.t.reserve(steps + 1);
    traj.field.zeta1.reserve(steps + 1);

    FourierField h = h0;
    FourierField stage(g);
    FourierField k1(g), k2(g), k3(g), k4(g);
    std::vector<cplx> scratch;
    const cplx mass0 = h.at(0, zero);

    auto record = [&](std::size_t i, double t, const ZetaPair& z) {
        traj.field.t.push_back(t);
        traj.field.zeta1.push_back(z.plus);
        traj.conjugation_defect = std::max(traj.conjugation_defect, z.conjugation_defect);
        traj.mass_drift = std::max(traj.mass_drift, std::abs(h.at(0, zero) - mass0));
        if (i % 100 == 0 || i == steps) {
            traj.reality_drift = std::max(traj.reality_drift, reality_defect(h));
        }
        if (i % static_cast<std::size_t>(params.snapshot_every) == 0 || i == steps) {
            traj.times.push_back(t);
            traj.snapshots.push_back(h);
            traj.truncation.boundary_max = std::max(traj.truncation.boundary_max, boundary_max(h));
        }
    };

    auto stage_state = [&](const FourierField& k, double c) {
        const auto src = h.coeffs();
        const auto kk = k.coeffs();
        auto dst = stage.coeffs();
        for (std::size_t i = 0; i < src.size(); ++i) {
            dst[i] = src[i] + c * kk[i];
        }
    };

    const double t0 = params.t_start;
    ZetaPair z = extract_zeta(h, t0, &traj.truncation);
    record(0, t0, z);
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = t0 + dt * static_cast<double>(i);
        rhs_into(h, t, z, params, k1, scratch);
        stage_state(k1, 0.5 * dt);
        rhs_into(stage, t + 0.5 * dt, extract_zeta(stage, t + 0.5 * dt, &traj.truncation), params, k2, scratch);
        stage_state(k2, 0.5 * dt);
        rhs_into(stage, t + 0.5 * dt, extract_zeta(stage, t + 0.5 * dt, &traj.truncation), params, k3, scratch);
        stage_state(k3, dt);
        rhs_into(stage, t + dt, extract_zeta(stage, t + dt, &traj.truncation), params, k4, scratch);

        auto hc = h.coeffs();
        const auto a = k1.coeffs();
        const auto b = k2.coeffs();
        const auto c = k3.coeffs();
        const auto d = k4.coeffs();
        double peak = 0.0;
        for (std::size_t e = 0; e < hc.size(); ++e) {
            hc[e] += (dt / 6.0) * (a[e] + 2.0 * (b[e] + c[e]) + d[e]);
            peak = std::max(peak, std::abs(hc[e]));
        }
        const double t_next = t0 + dt * static_cast<double>(i + 1);
        if (!(peak <= params.overflow_cap)) {
            throw BlowUp(t_next, peak);
        }
        z = extract_zeta(h, t_next, &traj.truncation);
        record(i + 1, t_next, z);
    }
    return traj;
}

}  // namespace hmf
