#include "hmf/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hmf/norms.hpp"
#include "hmf/volterra.hpp"

namespace hmf {

namespace {

std::size_t whole_steps(double span, double d_t) {
    const double n = std::round(span / d_t);
    if (std::abs(n * d_t - span) > 1e-9 * std::max(1.0, span)) {
        throw std::invalid_argument("T - tau = " + std::to_string(span) + " is not a whole number of steps d_t = " +
                                    std::to_string(d_t));
    }
    return static_cast<std::size_t>(n);
}

// Accumulates, node by node from t = T downward, the quadratic forcing
//   B_1(t)    =  int_t^T zeta_1(s)    h_0(s, t - s) (t - s) ds
//   B_{-1}(t) = -int_t^T zeta_{-1}(s) h_2(s, t + s) (t - s) ds
// on the nodes t_p = tau + p d_t. Node m counts from T. Composite Simpson in s,
// closed by a three-point rule on the last interval when the count is odd; the
// integrand vanishes at s = t.
class ForcingAccumulator {
public:
    ForcingAccumulator(std::size_t steps, double tau, double d_t)
        : steps_(steps), tau_(tau), d_t_(d_t), b1_(steps + 1), bm1_(steps + 1) {}

    void add(std::size_t m, const FourierField& state, cplx zeta1) {
        const double s = tau_ + d_t_ * static_cast<double>(steps_ - m);
        const cplx zm = std::conj(zeta1);
        const bool has2 = state.has_mode(2);
        for (std::size_t q = m + 1; q <= steps_; ++q) {
            const double w = weight(q, m);
            const double t = tau_ + d_t_ * static_cast<double>(steps_ - q);
            const double lag = t - s;
            const std::size_t p = steps_ - q;
            b1_[p] += w * zeta1 * eval_shifted(state, 0, lag) * lag;
            if (has2) {
                bm1_[p] -= w * zm * eval_shifted(state, 2, t + s) * lag;
            }
        }
    }

    // Scaled by d_t / 3 on return.
    [[nodiscard]] std::vector<cplx> b1() const { return scaled(b1_); }
    [[nodiscard]] std::vector<cplx> bm1() const { return scaled(bm1_); }

private:
    // Weight of node m in the integral ending at node q, in units of d_t / 3.
    static double weight(std::size_t q, std::size_t m) {
        if (q == 1) {
            return 1.5;
        }
        if (q % 2 == 0) {
            if (m == 0 || m == q) {
                return 1.0;
            }
            return m % 2 == 1 ? 4.0 : 2.0;
        }
        if (m == q) {
            return 1.25;
        }
        if (m == q - 1) {
            return 3.0;
        }
        if (m == q - 2) {
            return 3.75;
        }
        if (m == 0) {
            return 1.0;
        }
        return m % 2 == 1 ? 4.0 : 2.0;
    }

    [[nodiscard]] std::vector<cplx> scaled(const std::vector<cplx>& v) const {
        std::vector<cplx> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            out[i] = v[i] * (d_t_ / 3.0);
        }
        return out;
    }

    std::size_t steps_;
    double tau_;
    double d_t_;
    std::vector<cplx> b1_;
    std::vector<cplx> bm1_;
};

// Cubic Lagrange refinement of samples on a uniform grid by an integer factor.
std::vector<cplx> refine(const std::vector<cplx>& coarse, std::size_t factor) {
    const std::size_t n = coarse.size();
    if (n < 4) {
        std::vector<cplx> out((n - 1) * factor + 1);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const std::size_t k = std::min(i / factor, n - 2);
            const double f = static_cast<double>(i) / factor - static_cast<double>(k);
            out[i] = n == 1 ? coarse[0] : (1.0 - f) * coarse[k] + f * coarse[k + 1];
        }
        return out;
    }
    std::vector<cplx> out((n - 1) * factor + 1);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double pos = static_cast<double>(i) / static_cast<double>(factor);
        const auto cell = std::min(static_cast<std::size_t>(pos), n - 2);
        const std::size_t base = std::clamp<std::size_t>(cell == 0 ? 0 : cell - 1, 0, n - 4);
        const double x = pos - static_cast<double>(base);
        cplx acc{};
        for (std::size_t r = 0; r < 4; ++r) {
            double l = 1.0;
            for (std::size_t k = 0; k < 4; ++k) {
                if (k != r) {
                    l *= (x - static_cast<double>(k)) / (static_cast<double>(r) - static_cast<double>(k));
                }
            }
            acc += l * coarse[base + r];
        }
        out[i] = acc;
    }
    return out;
}

double stability_check(const ScatteringConfig& config) {
    const auto j = kernel_j(config.background, 1, config.sign);
    const KernelOnGrid kernel = sample_kernel(j, 0.02, 40.0, 1.0);
    double variation = std::abs(kernel.values.front());
    for (std::size_t i = 1; i < kernel.size(); ++i) {
        variation += std::abs(kernel.values[i] - kernel.values[i - 1]);
    }
    const StabilityReport rep = stability_margin(kernel, std::max(15.0, 2.0 * variation + 1.0), 1501);
    if (!rep.satisfied) {
        throw std::invalid_argument("background fails the stability condition: min |1 - L[j_1]| = " +
                                    std::to_string(rep.margin));
    }
    return rep.margin;
}

struct SweepOutput {
    std::vector<double> times;
    std::vector<FourierField> snapshots;
    std::vector<cplx> readout;  // zeta_1 read out at each node, ascending in time
    std::vector<cplx> b1;
    std::vector<cplx> bm1;
    TruncationStats truncation;
    double conjugation_defect = 0.0;
    double reality_drift = 0.0;
    double mass_drift = 0.0;
};

bool is_snapshot(std::size_t i, std::size_t steps, int every) {
    return i % static_cast<std::size_t>(every) == 0 || i == steps;
}

// Backward RK4 sweep from h(T) = datum with zeta frozen on the half-step grid.
// With zeta_half empty the state is held at the datum (the initial iterate).
SweepOutput sweep(const ScatteringConfig& config, std::size_t steps, const std::vector<cplx>& zeta_half) {
    const FourierField& datum = config.datum;
    const Grid& g = datum.grid();
    const double dt = config.d_t;
    const double tau = config.tau;
    EvolutionParams params;
    params.epsilon = config.epsilon;
    params.sign = config.sign;
    params.d_t = dt;
    params.profile = config.background;

    SweepOutput out;
    out.readout.resize(steps + 1);
    ForcingAccumulator acc(steps, tau, dt);
    const std::size_t zero = static_cast<std::size_t>(g.half_nodes);
    const cplx mass_T = datum.at(0, zero);

    FourierField h = datum;
    FourierField stage(g);
    FourierField k1(g), k2(g), k3(g), k4(g);
    std::vector<cplx> scratch;

    auto visit = [&](std::size_t i) {
        const double t = tau + dt * static_cast<double>(i);
        const ZetaPair z = extract_zeta(h, t, &out.truncation);
        out.readout[i] = z.plus;
        out.conjugation_defect = std::max(out.conjugation_defect, z.conjugation_defect);
        out.mass_drift = std::max(out.mass_drift, std::abs(h.at(0, zero) - mass_T));
        acc.add(steps - i, h, z.plus);
        if ((steps - i) % 100 == 0 || i == 0) {
            out.reality_drift = std::max(out.reality_drift, reality_defect(h));
        }
        if (is_snapshot(i, steps, config.snapshot_every)) {
            out.times.push_back(t);
            out.snapshots.push_back(h);
        }
    };

    auto stage_state = [&](const FourierField& k, double c) {
        const auto src = h.coeffs();
        const auto kk = k.coeffs();
        auto dst = stage.coeffs();
        for (std::size_t e = 0; e < src.size(); ++e) {
            dst[e] = src[e] + c * kk[e];
        }
    };
    auto pair = [](cplx z) { return ZetaPair{z, std::conj(z), 0.0}; };

    visit(steps);
    for (std::size_t i = steps; i > 0; --i) {
        if (!zeta_half.empty()) {
            const double t = tau + dt * static_cast<double>(i);
            const double hs = -dt;
            const cplx z0 = zeta_half[2 * i];
            const cplx zh = zeta_half[2 * i - 1];
            const cplx z1 = zeta_half[2 * i - 2];
            rhs_into(h, t, pair(z0), params, k1, scratch);
            stage_state(k1, 0.5 * hs);
            rhs_into(stage, t + 0.5 * hs, pair(zh), params, k2, scratch);
            stage_state(k2, 0.5 * hs);
            rhs_into(stage, t + 0.5 * hs, pair(zh), params, k3, scratch);
            stage_state(k3, hs);
            rhs_into(stage, t + hs, pair(z1), params, k4, scratch);
            auto hc = h.coeffs();
            const auto a = k1.coeffs();
            const auto b = k2.coeffs();
            const auto c = k3.coeffs();
            const auto d = k4.coeffs();
            double peak = 0.0;
            for (std::size_t e = 0; e < hc.size(); ++e) {
                hc[e] += (hs / 6.0) * (a[e] + 2.0 * (b[e] + c[e]) + d[e]);
                peak = std::max(peak, std::abs(hc[e]));
            }
            if (!(peak <= 1e6)) {
                throw BlowUp(t + hs, peak);
            }
        }
        visit(i - 1);
    }
    std::reverse(out.times.begin(), out.times.end());
    std::reverse(out.snapshots.begin(), out.snapshots.end());
    out.b1 = acc.b1();
    out.bm1 = acc.bm1();
    return out;
}

double snapshot_distance(const std::vector<FourierField>& a, const std::vector<FourierField>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        m = std::max(m, sup_distance(a[i], b[i]));
    }
    return m;
}

}  // namespace

double PicardTrace::max_ratio_after_first() const {
    double m = 0.0;
    for (std::size_t i = 1; i < steps.size(); ++i) {
        m = std::max(m, steps[i].ratio);
    }
    return m;
}

void validate(const ScatteringConfig& config) {
    const Grid& g = config.datum.grid();
    if (config.datum.coeffs().empty()) {
        throw std::invalid_argument("scattering: empty terminal datum");
    }
    if (!(config.tau >= 0.0) || !(config.tau < config.T)) {
        throw std::invalid_argument("scattering: need 0 <= tau < T (tau = " + std::to_string(config.tau) +
                                    ", T = " + std::to_string(config.T) + ")");
    }
    if (config.T > g.t_final + 1e-12) {
        throw std::invalid_argument("scattering: T = " + std::to_string(config.T) + " exceeds the grid horizon " +
                                    std::to_string(g.t_final));
    }
    if (!(config.picard.tol > 0.0) || config.picard.max_iters < 1) {
        throw std::invalid_argument("scattering: need picard tol > 0 and max_iters >= 1");
    }
    if (!(config.d_t > 0.0) || config.d_t > 0.1) {
        throw std::invalid_argument("scattering: d_t must lie in (0, 0.1]");
    }
    if (!(config.epsilon >= 0.0)) {
        throw std::invalid_argument("scattering: epsilon must be >= 0");
    }
    if (config.sign != 1.0 && config.sign != -1.0) {
        throw std::invalid_argument("scattering: force sign must be +1 or -1");
    }
    if (config.snapshot_every < 1) {
        throw std::invalid_argument("scattering: snapshot_every must be >= 1");
    }
    (void)whole_steps(config.T - config.tau, config.d_t);
}

ScatteringResult backward_solve(const ScatteringConfig& config) {
    validate(config);
    ScatteringResult result;
    if (config.require_stability) {
        result.stability_margin = stability_check(config);
    }
    const std::size_t steps = whole_steps(config.T - config.tau, config.d_t);
    const double dt = config.d_t;
    const double tau = config.tau;
    const double span = config.T - tau;

    // Field-equation kernel j_{-1} at lag s - t, sampled on the quarter-step grid.
    const KernelOnGrid kernel = sample_kernel(kernel_j(config.background, -1, config.sign), 0.25 * dt, span, 1.0);
    std::vector<cplx> datum_quarter(4 * steps + 1);
    for (std::size_t i = 0; i < datum_quarter.size(); ++i) {
        datum_quarter[i] = eval_shifted(config.datum, 1, tau + 0.25 * dt * static_cast<double>(i));
    }

    SweepOutput current = sweep(config, steps, {});
    std::vector<cplx> zeta_prev(2 * steps + 1, cplx{});
    double previous_diff = std::numeric_limits<double>::quiet_NaN();
    double first_diff = 0.0;
    std::vector<cplx> zeta_half;

    for (int iter = 1; iter <= config.picard.max_iters; ++iter) {
        // (a) field equation with the quadratic forcing of the current iterate
        std::vector<cplx> forcing(steps + 1);
        for (std::size_t p = 0; p <= steps; ++p) {
            forcing[p] = 0.5 * config.epsilon * config.sign * (current.b1[p] + current.bm1[p]);
        }
        std::vector<cplx> g = refine(forcing, 4);
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] += datum_quarter[i];
        }
        zeta_half = solve_volterra_extrapolated(g, kernel, Direction::backward, IntegralSign::plus);

        // (b) transport with the field frozen
        SweepOutput next;
        try {
            next = sweep(config, steps, zeta_half);
        } catch (const BlowUp& e) {
            result.trace.diverged = true;
            result.trace.stop_reason = e.what();
            break;
        }

        PicardStep step;
        step.iter = iter;
        for (std::size_t i = 0; i < zeta_half.size(); ++i) {
            step.zeta_diff = std::max(step.zeta_diff, std::abs(zeta_half[i] - zeta_prev[i]));
        }
        step.h_diff = snapshot_distance(next.snapshots, current.snapshots);
        step.sup_diff = std::max(step.zeta_diff, step.h_diff);
        step.ratio = iter == 1 ? std::numeric_limits<double>::quiet_NaN() : step.sup_diff / previous_diff;
        FieldSeries readout;
        readout.t.resize(steps + 1);
        for (std::size_t i = 0; i <= steps; ++i) {
            readout.t[i] = tau + dt * static_cast<double>(i);
        }
        readout.zeta1 = next.readout;
        step.M = functional_M(readout, config.lambda).value;
        result.trace.steps.push_back(step);

        current = std::move(next);
        zeta_prev = zeta_half;
        if (iter == 1) {
            first_diff = step.sup_diff;
        }
        previous_diff = step.sup_diff;

        if (!std::isfinite(step.sup_diff) ||
            (iter > 1 && step.sup_diff > config.picard.divergence_factor * std::max(first_diff, 1e-300))) {
            result.trace.diverged = true;
            result.trace.stop_reason = "iterate differences grew past the divergence factor";
            break;
        }
        if (step.sup_diff < config.picard.tol) {
            result.trace.converged = true;
            result.trace.stop_reason = "converged";
            break;
        }
    }
    if (!result.trace.converged && !result.trace.diverged) {
        result.trace.diverged = true;
        result.trace.stop_reason = "max_iters reached without convergence";
    }

    result.traj.times = std::move(current.times);
    result.traj.snapshots = std::move(current.snapshots);
    result.traj.field.t.resize(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        result.traj.field.t[i] = tau + dt * static_cast<double>(i);
    }
    result.traj.field.zeta1 = std::move(current.readout);
    result.traj.truncation = current.truncation;
    result.traj.conjugation_defect = current.conjugation_defect;
    result.traj.reality_drift = current.reality_drift;
    result.traj.mass_drift = current.mass_drift;
    for (const auto& snap : result.traj.snapshots) {
        const std::size_t nx = snap.grid().xi_count();
        for (int n = -snap.grid().n_max; n <= snap.grid().n_max; ++n) {
            const auto row = snap.row(n);
            result.traj.truncation.boundary_max =
                std::max({result.traj.truncation.boundary_max, std::abs(row[0]), std::abs(row[nx - 1])});
        }
    }
    result.volterra.t = result.traj.field.t;
    result.volterra.zeta1.resize(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        result.volterra.zeta1[i] = zeta_half.empty() ? cplx{} : zeta_half[2 * i];
    }
    result.b1 = std::move(current.b1);
    result.bm1 = std::move(current.bm1);
    return result;
}

ScatteringResult nonperturbative_solve(ScatteringConfig config) {
    config.epsilon = 1.0;
    return backward_solve(config);
}

double zero_mode_identity_defect(const ScatteringResult& result, const ScatteringConfig& config) {
    const auto& snaps = result.traj.snapshots;
    const auto& times = result.traj.times;
    if (snaps.size() < 3) {
        return 0.0;
    }
    const double factor = config.epsilon * config.sign;
    double scale = 0.0;
    for (const auto& s : snaps) {
        for (const auto& c : s.row(0)) {
            scale = std::max(scale, std::abs(c));
        }
    }
    if (scale == 0.0) {
        return 0.0;
    }
    // zeta_1 at snapshot times from the read-out series
    std::vector<cplx> zeta(snaps.size());
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        zeta[i] = eval_shifted(snaps[i], 1, times[i]);
    }
    double worst = 0.0;
    const std::size_t stride = std::max<std::size_t>(1, snaps.size() / 8);
    for (std::size_t si = 0; si + 1 < snaps.size(); si += stride) {
        for (double xi = -4.0; xi <= 4.0 + 1e-12; xi += 0.5) {
            cplx integral{};
            for (std::size_t l = si; l + 1 < snaps.size(); ++l) {
                auto integrand = [&](std::size_t idx) {
                    cplx acc{};
                    for (int k : {-1, 1}) {
                        const cplx zk = k == 1 ? zeta[idx] : std::conj(zeta[idx]);
                        acc += 0.5 * k * zk * eval_shifted(snaps[idx], -k, xi - k * times[idx]);
                    }
                    return acc * xi;
                };
                integral += 0.5 * (times[l + 1] - times[l]) * (integrand(l) + integrand(l + 1));
            }
            const cplx predicted = eval_shifted(config.datum, 0, xi) + factor * integral;
            worst = std::max(worst, std::abs(eval_shifted(snaps[si], 0, xi) - predicted));
        }
    }
    return worst / scale;
}

ContinuationResult continue_in_T(const ScatteringConfig& config, const std::vector<double>& T_list) {
    if (!std::is_sorted(T_list.begin(), T_list.end())) {
        throw std::invalid_argument("continue_in_T: T_list must be sorted");
    }
    ContinuationResult out;
    out.horizons = T_list;
    for (double T : T_list) {
        ScatteringConfig c = config;
        c.T = T;
        out.runs.push_back(backward_solve(c));
        if (out.runs.back().trace.diverged) {
            throw std::runtime_error("continue_in_T: Picard iteration diverged at T = " + std::to_string(T) + " (" +
                                     out.runs.back().trace.stop_reason + ")");
        }
    }
    for (std::size_t i = 0; i + 1 < out.runs.size(); ++i) {
        const auto& a = out.runs[i];
        const auto& b = out.runs[i + 1];
        ContinuationPair pair;
        pair.T_short = T_list[i];
        pair.T_long = T_list[i + 1];
        const std::size_t n = std::min(a.traj.field.size(), b.traj.field.size());
        for (std::size_t k = 0; k < n; ++k) {
            pair.zeta_diff = std::max(pair.zeta_diff, std::abs(a.traj.field.zeta1[k] - b.traj.field.zeta1[k]));
        }
        for (std::size_t s = 0; s < a.traj.snapshots.size(); ++s) {
            const double t = a.traj.times[s];
            for (std::size_t r = 0; r < b.traj.snapshots.size(); ++r) {
                if (std::abs(b.traj.times[r] - t) < 1e-9) {
                    pair.h_diff = std::max(pair.h_diff, sup_distance(a.traj.snapshots[s], b.traj.snapshots[r]));
                    break;
                }
            }
        }
        out.pairs.push_back(pair);
    }
    return out;
}

}  // namespace hmf
