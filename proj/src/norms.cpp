#include "hmf/norms.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hmf {

namespace {

constexpr int kMuPoints = 64;
constexpr double kMuRefine = 6.0;  // decades of refinement toward the admissibility boundary

// Nonzero coefficients of a field in log form, for sup_{n,xi} mu b + p ln b + ln|g|.
struct LogField {
    std::vector<double> b;
    std::vector<double> lnb;
    std::vector<double> lg;
    std::vector<int> mode;
    std::vector<double> xi;

    explicit LogField(const FourierField& f) {
        const Grid& g = f.grid();
        for (int n = -g.n_max; n <= g.n_max; ++n) {
            const auto row = f.row(n);
            for (std::size_t j = 0; j < row.size(); ++j) {
                const double m = std::abs(row[j]);
                if (m > 0.0) {
                    const double bb = bracket(n, g.xi(j));
                    b.push_back(bb);
                    lnb.push_back(std::log(bb));
                    lg.push_back(std::log(m));
                    mode.push_back(n);
                    xi.push_back(g.xi(j));
                }
            }
        }
    }

    // Drops entries that cannot attain the sup for any mu in [0, mu_max] at weight power p.
    void prune(double mu_max, int p) {
        if (b.empty()) {
            return;
        }
        // Any kept maximizer has value >= best + mu (b >= 1); entry e can beat that only if
        // c_e + mu_max (b_e - 1) >= best.
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t e = 0; e < b.size(); ++e) {
            best = std::max(best, lg[e] + p * lnb[e]);
        }
        const double mm = std::max(0.0, mu_max);
        std::size_t w = 0;
        for (std::size_t e = 0; e < b.size(); ++e) {
            if (lg[e] + p * lnb[e] + mm * (b[e] - 1.0) >= best - 1e-12) {
                b[w] = b[e];
                lnb[w] = lnb[e];
                lg[w] = lg[e];
                mode[w] = mode[e];
                xi[w] = xi[e];
                ++w;
            }
        }
        b.resize(w);
        lnb.resize(w);
        lg.resize(w);
        mode.resize(w);
        xi.resize(w);
    }

    [[nodiscard]] bool empty() const noexcept { return b.empty(); }

    // log of sup e^{mu b} b^p |g|, and the maximizing entry.
    [[nodiscard]] std::pair<double, std::size_t> sup_log(double mu, int p) const {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t e = 0; e < b.size(); ++e) {
            const double v = mu * b[e] + p * lnb[e] + lg[e];
            if (v > best) {
                best = v;
                arg = e;
            }
        }
        return {best, arg};
    }
};

NormReport field_sup(const FourierField& field, double mu, int p) {
    if (mu < 0.0 || p < 0) {
        throw std::invalid_argument("norm: need mu >= 0 and p >= 0");
    }
    NormReport rep;
    rep.mu = mu;
    const LogField lf(field);
    if (lf.empty()) {
        return rep;
    }
    const auto [v, arg] = lf.sup_log(mu, p);
    rep.value = std::exp(v);
    rep.mode = lf.mode[arg];
    rep.xi = lf.xi[arg];
    return rep;
}

// mu on [0, mu_max): mu_k = mu_max - mu_max 10^{-kMuRefine k / (kMuPoints - 1)}
std::vector<double> mu_grid(double mu_max) {
    std::vector<double> out(kMuPoints);
    for (int k = 0; k < kMuPoints; ++k) {
        out[k] = mu_max - mu_max * std::pow(10.0, -kMuRefine * k / (kMuPoints - 1));
    }
    return out;
}

// sup over snapshots t >= t_lo and mu in [0, mu_max(t)) of (mu_max(t) - mu)^{1/2} ||h(t)||_{mu, p} * scale(t)
template <class MuMax, class Scale>
NormReport weighted_sup(const Trajectory& traj, double t_lo, int p, MuMax mu_max_of, Scale scale_of) {
    NormReport rep;
    rep.empty_domain = true;
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        const double t = traj.times[s];
        if (t < t_lo) {
            continue;
        }
        const double mu_max = mu_max_of(t);
        if (!(mu_max > 0.0)) {
            continue;
        }
        rep.empty_domain = false;
        LogField lf(traj.snapshots[s]);
        lf.prune(mu_max, p);
        if (lf.empty()) {
            continue;
        }
        const double scale = scale_of(t);
        for (double mu : mu_grid(mu_max)) {
            const auto [v, arg] = lf.sup_log(mu, p);
            const double val = std::sqrt(mu_max - mu) * std::exp(v) * scale;
            if (val > rep.value) {
                rep.value = val;
                rep.mu = mu;
                rep.t = t;
                rep.mode = lf.mode[arg];
                rep.xi = lf.xi[arg];
            }
        }
    }
    return rep;
}

double rk4_rate(double delta, double t, double a) { return -delta * std::exp(-a * t) * (1.0 + t); }

std::size_t whole_steps(double span, double d_t) {
    if (!(d_t > 0.0)) {
        throw std::invalid_argument("weight: d_t must be positive");
    }
    const double n = std::round(span / d_t);
    if (std::abs(n * d_t - span) > 1e-9 * std::max(1.0, span)) {
        throw std::invalid_argument("weight: horizon " + std::to_string(span) + " is not a multiple of d_t");
    }
    return static_cast<std::size_t>(n);
}

double extrapolate_zero(const std::vector<double>& x, const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double l = 1.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            if (k != i) {
                l *= (0.0 - x[k]) / (x[i] - x[k]);
            }
        }
        acc += l * y[i];
    }
    return acc;
}

}  // namespace

NormReport analytic_norm(const FourierField& field, double mu) { return field_sup(field, mu, 0); }

NormReport weighted_norm_p(const FourierField& field, double lambda, int p) { return field_sup(field, lambda, p); }

double WeightFunction::at(double time) const {
    if (t.empty()) {
        throw std::logic_error("WeightFunction: empty");
    }
    if (time <= t.front()) {
        return a.front();
    }
    if (time >= t.back()) {
        return a.back();
    }
    const double pos = (time - t.front()) / d_t;
    const auto i = std::min(static_cast<std::size_t>(pos), t.size() - 2);
    const double f = pos - static_cast<double>(i);
    return (1.0 - f) * a[i] + f * a[i + 1];
}

WeightFunction solve_a(double T, double delta, double d_t) {
    if (!(delta > 0.0)) {
        throw std::invalid_argument("solve_a: delta must be positive");
    }
    if (!(T > 0.0)) {
        throw std::invalid_argument("solve_a: T must be positive");
    }
    const std::size_t n = whole_steps(T, d_t);
    WeightFunction w;
    w.T = T;
    w.delta = delta;
    w.d_t = d_t;
    w.t.resize(n + 1);
    w.a.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        w.t[i] = d_t * static_cast<double>(i);
    }
    w.a[n] = 0.0;
    const double h = -d_t;
    for (std::size_t i = n; i > 0; --i) {
        const double t = w.t[i];
        const double a = w.a[i];
        const double k1 = rk4_rate(delta, t, a);
        const double k2 = rk4_rate(delta, t + 0.5 * h, a + 0.5 * h * k1);
        const double k3 = rk4_rate(delta, t + 0.5 * h, a + 0.5 * h * k2);
        const double k4 = rk4_rate(delta, t + h, a + h * k3);
        w.a[i - 1] = a + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(w.a[i] > 0.0) || !(w.a[i] > w.a[i + 1])) {
            throw std::runtime_error("solve_a: positivity/monotonicity lost at t = " + std::to_string(w.t[i]));
        }
    }
    return w;
}

AInfinityReport a_infinity_report(double delta, double t_max, double d_t, double T0, int max_retries) {
    if (!(delta > 0.0) || !(t_max > 0.0)) {
        throw std::invalid_argument("a_infinity: need delta > 0 and t_max > 0");
    }
    AInfinityReport rep;
    double base = T0;
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        rep.retries = attempt;
        std::vector<double> horizons{base, 2.0 * base, 4.0 * base, 8.0 * base};
        std::vector<double> a0(horizons.size());
        for (std::size_t i = 0; i < horizons.size(); ++i) {
            a0[i] = solve_a(horizons[i], delta, d_t).at_zero();
        }
        // Polynomial extrapolation in 1/T of order 0, 1 or 2 over the tail of each
        // triple; the order whose two triples agree best wins. a_T(0) increases
        // in T, so estimates below a computed a_T(0) are discarded.
        auto estimate = [&](std::size_t first_index, int order) {
            std::vector<double> x;
            std::vector<double> y;
            for (std::size_t i = first_index + 2 - static_cast<std::size_t>(order); i <= first_index + 2; ++i) {
                x.push_back(1.0 / horizons[i]);
                y.push_back(a0[i]);
            }
            return extrapolate_zero(x, y);
        };
        const double floor = *std::max_element(a0.begin(), a0.end());
        double best_gap = std::numeric_limits<double>::infinity();
        double chosen = floor;
        for (int order = 0; order <= 2; ++order) {
            const double coarse = estimate(0, order);
            const double fine = estimate(1, order);
            if (fine < floor || coarse < a0[2]) {
                continue;
            }
            if (std::abs(fine - coarse) < best_gap) {
                best_gap = std::abs(fine - coarse);
                chosen = fine;
                rep.order = order;
            }
        }
        const double first = chosen;
        rep.horizons.assign(horizons.begin() + 1, horizons.end());
        rep.a0_at_T.assign(a0.begin() + 1, a0.end());
        rep.a0 = first;
        rep.consistency = best_gap;

        const std::size_t n = whole_steps(t_max, d_t);
        WeightFunction w;
        w.T = std::numeric_limits<double>::infinity();
        w.delta = delta;
        w.d_t = d_t;
        w.t.resize(n + 1);
        w.a.resize(n + 1);
        w.t[0] = 0.0;
        w.a[0] = first;
        bool positive = first > 0.0;
        for (std::size_t i = 0; i < n && positive; ++i) {
            const double t = d_t * static_cast<double>(i);
            const double a = w.a[i];
            const double k1 = rk4_rate(delta, t, a);
            const double k2 = rk4_rate(delta, t + 0.5 * d_t, a + 0.5 * d_t * k1);
            const double k3 = rk4_rate(delta, t + 0.5 * d_t, a + 0.5 * d_t * k2);
            const double k4 = rk4_rate(delta, t + d_t, a + d_t * k3);
            w.t[i + 1] = d_t * static_cast<double>(i + 1);
            w.a[i + 1] = a + d_t / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            positive = w.a[i + 1] > 0.0;
        }
        rep.weight = std::move(w);
        rep.positive = positive;
        if (positive) {
            return rep;
        }
        base *= 2.0;
    }
    return rep;
}

WeightFunction a_infinity(double delta, double t_max, double d_t) {
    auto rep = a_infinity_report(delta, t_max, d_t);
    if (!rep.positive) {
        throw std::runtime_error("a_infinity: forward integration lost positivity after " +
                                 std::to_string(rep.retries) + " retries");
    }
    return rep.weight;
}

NormReport functional_M(const FieldSeries& zeta, double lambda, double t_lo, double t_hi) {
    NormReport rep;
    rep.empty_domain = true;
    for (std::size_t i = 0; i < zeta.size(); ++i) {
        const double t = zeta.t[i];
        if (t < t_lo - 1e-12 || t > t_hi + 1e-12) {
            continue;
        }
        rep.empty_domain = false;
        const double v = std::exp(lambda * t) * std::abs(zeta.zeta1[i]);
        if (v > rep.value || (i == 0 && v == rep.value)) {
            rep.value = v;
            rep.t = t;
        }
    }
    return rep;
}

NormReport functional_N(const Trajectory& traj, double lambda, const WeightFunction& weight, double t_lo) {
    return weighted_sup(
        traj, t_lo, 0, [&](double t) { return lambda - weight.Delta * weight.at(t); }, [](double) { return 1.0; });
}

std::pair<NormReport, NormReport> functional_J_K(const FieldSeries& zeta, const Trajectory& traj, double lambda0,
                                                 double delta, int p, int q) {
    if (!(delta < 2.0 * lambda0 / std::numbers::pi)) {
        throw std::invalid_argument("functional_J_K: need delta < 2 lambda0 / pi");
    }
    if (q < 3 || p < q + 3) {
        throw std::invalid_argument("functional_J_K: need q >= 3 and p >= q + 3");
    }
    auto lambda_max = [&](double t) { return lambda0 - delta * std::atan(t); };

    // e^{lambda t} is increasing in lambda, so the sup over beta > 0 is the boundary value.
    NormReport j;
    for (std::size_t i = 0; i < zeta.size(); ++i) {
        const double t = zeta.t[i];
        const double v = std::exp(lambda_max(t) * t) * std::pow(bracket(t), p) * std::abs(zeta.zeta1[i]);
        if (v > j.value) {
            j.value = v;
            j.t = t;
            j.mu = lambda_max(t);
        }
    }

    NormReport k3;
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        const double t = traj.times[s];
        const NormReport r = weighted_norm_p(traj.snapshots[s], lambda_max(t), 3);
        if (r.value > k3.value) {
            k3 = r;
            k3.t = t;
        }
    }
    NormReport kp = weighted_sup(traj, -std::numeric_limits<double>::infinity(), p + 1, lambda_max,
                                 [&](double t) { return 1.0 / std::pow(bracket(t), q); });
    NormReport k = kp;
    k.value = k3.value + kp.value;
    return {j, k};
}

std::pair<NormReport, NormReport> functional_P_Q(const FieldSeries& zeta, const Trajectory& traj, double lambda,
                                                 double lambda_prime, double tau, const WeightFunction& weight) {
    if (!(lambda_prime < lambda)) {
        throw std::invalid_argument("functional_P_Q: need lambda' < lambda");
    }
    if (!(tau > 0.0)) {
        throw std::invalid_argument("functional_P_Q: need tau > 0");
    }
    NormReport p = functional_M(zeta, lambda, tau);
    NormReport q = functional_N(traj, lambda, weight, tau - 1e-12);
    return {p, q};
}

WeightFunction theta_weight(double T, double delta, double d_t, double lambda_prime, double tau) {
    WeightFunction w = solve_a(T, delta, d_t);
    const auto inf = a_infinity_report(delta, std::max(tau, d_t), d_t);
    const double a_tau = inf.weight.at(tau);
    if (!(a_tau > 0.0)) {
        throw std::runtime_error("theta_weight: a_inf(tau) is not positive");
    }
    w.Delta = lambda_prime / a_tau;
    return w;
}

}  // namespace hmf
