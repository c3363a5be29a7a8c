#include "hmf/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include <openssl/opensslv.h>

#include "hmf/diagnostics.hpp"
#include "hmf/norms.hpp"
#include "hmf/profiles.hpp"
#include "hmf/scattering.hpp"
#include "hmf/serialize.hpp"
#include "hmf/volterra.hpp"

namespace hmf {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Context {
    fs::path dir;
    int threads = 1;
    Headline headline;
    json convergence = json::object();
    TruncationStats truncation;
};

json cplx_json(cplx z) { return json{{"re", number_or_null(z.real())}, {"im", number_or_null(z.imag())}}; }

json norm_json(const NormReport& r) {
    return json{{"value", number_or_null(r.value)}, {"mode", r.mode},        {"xi", r.xi},
                {"mu", r.mu},                       {"t", number_or_null(r.t)}, {"empty_domain", r.empty_domain}};
}

json fit_json(const std::optional<DecayFit>& fit, const std::string& error) {
    if (!fit) {
        return json{{"error", error}};
    }
    return json{{"lambda_fit", fit->rate},
                {"amplitude", fit->amplitude},
                {"residual", fit->residual},
                {"t_lo", fit->t_lo},
                {"t_hi", fit->t_hi},
                {"nodes", fit->used},
                {"non_exponential", fit->non_exponential()}};
}

template <class F>
std::optional<DecayFit> try_fit(F&& f, std::string& error) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        error = e.what();
        return std::nullopt;
    }
}

Grid grid_for(const RunConfig& c) { return make_grid(c.n_max, c.effective_xi_max(), c.d_xi, c.horizon()); }

DatumSpec datum_spec(const RunConfig& c) {
    DatumSpec s;
    s.amplitude = c.amplitude;
    s.mode_weights = c.modes;
    s.width = c.width;
    s.shape = c.shape == "sech" ? DatumShape::sech : DatumShape::gaussian;
    s.bump_centers = c.centers;
    return s;
}

BGKState require_bgk(double beta) {
    const auto state = solve_bgk(beta);
    if (!state) {
        throw std::invalid_argument("no BGK fixed point at beta = " + format_real(beta) + " (need beta > 2)");
    }
    return *state;
}

/// Background profile and data field. With profile = bgk the field is omega - omega_bar.
std::pair<FourierField, Profile> background_and_datum(const RunConfig& c, const Grid& g) {
    if (c.profile == "bgk") {
        auto [field, profile] = bgk_to_field(require_bgk(c.beta), g);
        return {std::move(field), std::move(profile)};
    }
    return {make_asymptotic_datum(datum_spec(c), g), maxwellian(c.temperature)};
}

Profile background_profile(const RunConfig& c) {
    if (c.profile == "bgk") {
        const Grid g = make_grid(2, 8.0, 0.5, 4.0);
        return bgk_to_field(require_bgk(c.beta), g).second;
    }
    return maxwellian(c.temperature);
}

void write_zeta(const fs::path& path, const FieldSeries& z) {
    std::vector<std::vector<double>> rows;
    rows.reserve(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        rows.push_back({z.t[i], z.zeta1[i].real(), z.zeta1[i].imag(), std::abs(z.zeta1[i])});
    }
    write_csv(path, {"t", "re_zeta1", "im_zeta1", "abs_zeta1"}, rows);
}

void write_picard(const fs::path& path, const PicardTrace& trace) {
    std::vector<std::vector<double>> rows;
    for (const auto& s : trace.steps) {
        rows.push_back({static_cast<double>(s.iter), s.sup_diff, s.ratio});
    }
    write_csv(path, {"iter", "sup_diff", "contraction_ratio"}, rows);
}

void write_trajectory(const fs::path& dir, const Trajectory& traj, int stride) {
    std::vector<FourierField> snaps;
    std::vector<double> times;
    const std::size_t n = traj.snapshots.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (i % static_cast<std::size_t>(stride) == 0 || i + 1 == n) {
            snaps.push_back(traj.snapshots[i]);
            times.push_back(traj.times[i]);
        }
    }
    write_snapshots(dir / "snapshots.bin", snaps);
    if (!snaps.empty()) {
        write_json(dir / "snapshots.json", snapshot_sidecar(snaps.front().grid(), times, "snapshots.bin"));
    }
}

void merge_truncation(TruncationStats& into, const TruncationStats& from) {
    into.out_of_range_reads += from.out_of_range_reads;
    into.boundary_max = std::max(into.boundary_max, from.boundary_max);
}

json picard_json(const PicardTrace& trace) {
    json steps = json::array();
    for (const auto& s : trace.steps) {
        steps.push_back({{"iter", s.iter},
                         {"zeta_diff", number_or_null(s.zeta_diff)},
                         {"h_diff", number_or_null(s.h_diff)},
                         {"sup_diff", number_or_null(s.sup_diff)},
                         {"contraction_ratio", number_or_null(s.ratio)},
                         {"M", number_or_null(s.M)}});
    }
    return json{{"converged", trace.converged},
                {"diverged", trace.diverged},
                {"iterations", trace.iterations()},
                {"stop_reason", trace.stop_reason},
                {"steps", steps}};
}

double defined_max_ratio(const PicardTrace& trace) {
    return trace.steps.size() >= 2 ? trace.max_ratio_after_first() : kNaN;
}

ScatteringConfig scattering_config(const RunConfig& c, FourierField datum, Profile background) {
    ScatteringConfig sc;
    sc.datum = std::move(datum);
    sc.background = std::move(background);
    sc.epsilon = c.epsilon;
    sc.sign = c.sign;
    sc.T = c.T;
    sc.tau = c.tau;
    sc.d_t = c.d_t;
    sc.snapshot_every = c.snapshot_every;
    sc.picard.max_iters = c.max_iters;
    sc.picard.tol = c.tol;
    sc.lambda = c.lambda;
    return sc;
}

double fit_lo(const RunConfig& c) { return c.fit_from < 0.0 ? 0.5 * c.T : c.fit_from; }
double fit_hi(const RunConfig& c) { return c.fit_to < 0.0 ? c.T : c.fit_to; }

// ---------- scenarios ----------

void run_stability(const RunConfig& c, Context& ctx) {
    const Profile profile = background_profile(c);
    const double kd_t = 0.02;
    const double t_end = 40.0;
    const double rate = 1.0;
    const KernelOnGrid kernel = sample_kernel(kernel_j(profile, 1, c.sign), kd_t, t_end, rate);
    StabilityOptions opts;
    opts.threshold = c.threshold;
    opts.bound_M = c.bound_M;
    opts.lambda = c.lambda;
    const StabilityReport rep = stability_margin(kernel, c.omega_max, c.n_scan, opts);
    const LaplaceValue l0 = laplace(kernel, cplx{});
    const ResolventResult res = resolvent(kernel);

    json j;
    j["profile"] = profile.name;
    j["sign"] = c.sign;
    j["kernel"] = {{"d_t", kd_t}, {"t_end", t_end}, {"decay_rate", rate}};
    j["laplace_at_zero"] = {{"value", cplx_json(l0.value)}, {"error_bound", l0.error_bound}};
    j["margin"] = rep.margin;
    j["argmin_sigma"] = cplx_json(rep.argmin_sigma);
    j["threshold"] = c.threshold;
    j["satisfied"] = rep.satisfied;
    j["scan"] = {{"omega_max", rep.omega_max},
                 {"n_scan", rep.n_scan},
                 {"interior_lines", rep.interior_lines},
                 {"critical_value", rep.critical_value},
                 {"max_abs_laplace", rep.max_abs_laplace},
                 {"winding_number", rep.winding}};
    if (rep.sufficient_bound) {
        j["sufficient_bound"] = {{"bound_M", *c.bound_M},
                                 {"lambda", c.lambda},
                                 {"bound", *rep.sufficient_bound},
                                 {"satisfied", rep.sufficient_satisfied}};
    } else {
        j["sufficient_bound"] = nullptr;
    }
    j["resolvent"] = {{"l1_norm", number_or_null(res.l1_norm)}, {"bounded", res.bounded}};
    write_json(ctx.dir / "stability.json", j);

    ctx.headline.converged = rep.satisfied;
    ctx.convergence = {{"satisfied", rep.satisfied}, {"resolvent_bounded", res.bounded}};
}

void run_bgk(const RunConfig& c, Context& ctx) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < c.nu_points; ++i) {
        const double nu = c.nu_max * i / (c.nu_points - 1);
        const double om = omega_of_nu(c.beta, nu);
        rows.push_back({nu, om, om - nu});
    }
    write_csv(ctx.dir / "bgk.csv", {"nu", "omega", "omega_minus_nu"}, rows);

    const double h = 1e-4;
    const double slope = (omega_of_nu(c.beta, h) - omega_of_nu(c.beta, -h)) / (2.0 * h);
    const auto state = solve_bgk(c.beta);
    json j;
    j["beta"] = c.beta;
    j["slope_at_zero"] = slope;
    j["slope_expected"] = 0.5 * c.beta;
    if (state) {
        j["fixed_point"] = {{"nu", state->nu}, {"residual", state->residual}, {"normalizer", state->normalizer}};
    } else {
        j["fixed_point"] = nullptr;
    }
    write_json(ctx.dir / "bgk.json", j);
    ctx.headline.converged = state.has_value();
    ctx.convergence = {{"fixed_point_found", state.has_value()}};
}

void run_weights(const RunConfig& c, Context& ctx) {
    std::vector<WeightFunction> curves;
    std::vector<double> lx;
    std::vector<double> ly;
    json per_delta = json::array();
    for (double d : c.deltas) {
        curves.push_back(solve_a(c.weight_T, d, c.weight_dt));
        const double a0 = curves.back().at_zero();
        per_delta.push_back({{"delta", d}, {"a_T0", a0}});
        lx.push_back(std::log(d));
        ly.push_back(std::log(a0));
    }
    double slope = kNaN;
    double intercept = kNaN;
    if (lx.size() >= 2) {
        const double n = static_cast<double>(lx.size());
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i] / n;
            my += ly[i] / n;
        }
        double sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxx += (lx[i] - mx) * (lx[i] - mx);
            sxy += (lx[i] - mx) * (ly[i] - my);
        }
        if (sxx > 0.0) {
            slope = sxy / sxx;
            intercept = my - slope * mx;
        }
    }

    std::vector<std::string> header{"t"};
    for (double d : c.deltas) {
        header.push_back("a_T_delta_" + format_real(d));
    }
    std::vector<std::vector<double>> rows;
    const int samples = static_cast<int>(std::floor(c.weight_T)) + 1;
    for (int i = 0; i < samples; ++i) {
        std::vector<double> row{static_cast<double>(i)};
        for (const auto& w : curves) {
            row.push_back(w.at(i));
        }
        rows.push_back(std::move(row));
    }
    write_csv(ctx.dir / "weights.csv", header, rows);

    const AInfinityReport ai = a_infinity_report(c.delta, c.t_max, c.weight_dt);
    std::vector<std::vector<double>> arows;
    double amin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ai.weight.t.size(); ++i) {
        amin = std::min(amin, ai.weight.a[i]);
        const double t = ai.weight.t[i];
        if (std::abs(t - std::round(t)) < 1e-9) {
            arows.push_back({t, ai.weight.a[i]});
        }
    }
    write_csv(ctx.dir / "a_infinity.csv", {"t", "a_inf"}, arows);

    const WeightFunction at_delta = solve_a(c.weight_T, c.delta, c.weight_dt);
    json j;
    j["T"] = c.weight_T;
    j["d_t"] = c.weight_dt;
    j["per_delta"] = per_delta;
    j["loglog_fit"] = {{"slope", number_or_null(slope)}, {"intercept", number_or_null(intercept)}};
    j["a_T0_at_norms_delta"] = {{"delta", c.delta}, {"a_T0", at_delta.at_zero()}};
    j["a_infinity"] = {{"delta", c.delta},
                       {"t_max", c.t_max},
                       {"a0", ai.a0},
                       {"horizons", ai.horizons},
                       {"a0_at_T", ai.a0_at_T},
                       {"consistency", ai.consistency},
                       {"order", ai.order},
                       {"retries", ai.retries},
                       {"positive", ai.positive},
                       {"min_value", amin},
                       {"at_t_max", ai.weight.a.back()}};
    write_json(ctx.dir / "weights.json", j);

    ctx.headline.converged = ai.positive;
    ctx.headline.a_T0 = at_delta.at_zero();
    ctx.convergence = {{"a_infinity_positive", ai.positive}};
}

void run_forward(const RunConfig& c, Context& ctx) {
    const Grid g = grid_for(c);
    auto [h0, profile] = background_and_datum(c, g);
    EvolutionParams p;
    p.epsilon = c.epsilon;
    p.sign = c.sign;
    p.d_t = c.d_t;
    p.t_final = c.T;
    p.profile = profile;
    p.snapshot_every = c.snapshot_every;
    const Trajectory traj = forward_solve(h0, p);

    write_zeta(ctx.dir / "zeta.csv", traj.field);
    write_trajectory(ctx.dir, traj, c.snapshot_stride);

    std::string fit_error;
    const auto fit = try_fit([&] { return fit_decay(traj.field, fit_lo(c), fit_hi(c)); }, fit_error);
    std::vector<EchoEvent> echoes;
    if (fit) {
        echoes = detect_echoes(traj.field, *fit, c.echo_threshold);
    }
    double first = 0.0;
    double second = 0.0;
    for (std::size_t i = 0; i < traj.field.size(); ++i) {
        (traj.field.t[i] <= 0.5 * c.T ? first : second) =
            std::max(traj.field.t[i] <= 0.5 * c.T ? first : second, std::abs(traj.field.zeta1[i]));
    }
    const auto [J, K] = functional_J_K(traj.field, traj, c.lambda0, c.delta, c.p, c.q);
    const NormReport M = functional_M(traj.field, c.lambda);

    json ej = json::array();
    for (const auto& e : echoes) {
        ej.push_back({{"t", e.time}, {"prominence", e.prominence}});
    }
    json j;
    j["datum_norm"] = norm_json(analytic_norm(h0, c.lambda));
    j["M"] = norm_json(M);
    j["J"] = norm_json(J);
    j["K"] = norm_json(K);
    j["decay_fit"] = fit_json(fit, fit_error);
    j["echoes"] = ej;
    j["field_max_first_half"] = first;
    j["field_max_second_half"] = second;
    j["conservation"] = {{"mass_drift", traj.mass_drift},
                         {"reality_drift", traj.reality_drift},
                         {"conjugation_defect", traj.conjugation_defect}};
    write_json(ctx.dir / "norms.json", j);

    merge_truncation(ctx.truncation, traj.truncation);
    ctx.headline.converged = true;
    ctx.headline.lambda_fit = fit ? fit->rate : kNaN;
    ctx.headline.M_norm = M.value;
    ctx.convergence = {{"completed", true}, {"second_half_below_first", second < first}};
}

struct BackwardRun {
    ScatteringConfig sc;
    ScatteringResult result;
    std::optional<ContinuationResult> continuation;
};

BackwardRun solve_backward(const RunConfig& c, bool nonperturbative) {
    const Grid g = grid_for(c);
    auto [datum, profile] = background_and_datum(c, g);
    BackwardRun out{scattering_config(c, std::move(datum), std::move(profile)), {}, std::nullopt};
    if (nonperturbative) {
        out.sc.epsilon = 1.0;
    }
    if (!c.horizons.empty()) {
        out.continuation = continue_in_T(out.sc, c.horizons);
        out.result = out.continuation->runs.back();
    } else {
        out.result = backward_solve(out.sc);
    }
    return out;
}

std::vector<double> distance_series(const Trajectory& traj, const FourierField& datum) {
    std::vector<double> y;
    for (const auto& s : traj.snapshots) {
        y.push_back(sup_distance(s, datum));
    }
    return y;
}

// Fourier sup next to the phase-space sup of h(t) - h_inf, every stride-th snapshot.
void write_distance(const fs::path& path, const Trajectory& traj, const FourierField& datum,
                    const std::vector<double>& fourier, int stride) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        if (i % static_cast<std::size_t>(stride) != 0 && i + 1 != traj.snapshots.size()) {
            continue;
        }
        FourierField diff = traj.snapshots[i];
        diff -= datum;
        const PhysicalSamples ps = to_physical(diff, 64, 257, 8.0);
        double phys = 0.0;
        for (double v : ps.values) {
            phys = std::max(phys, std::abs(v));
        }
        rows.push_back({traj.times[i], fourier[i], phys});
    }
    write_csv(path, {"t", "fourier_sup", "physical_sup"}, rows);
}

void write_continuation(const fs::path& path, const ContinuationResult& cr) {
    std::vector<std::vector<double>> rows;
    for (const auto& p : cr.pairs) {
        rows.push_back({p.T_short, p.T_long, p.zeta_diff, p.h_diff});
    }
    write_csv(path, {"T_short", "T_long", "zeta_diff", "h_diff"}, rows);
}

void run_backward(const RunConfig& c, Context& ctx) {
    const BackwardRun br = solve_backward(c, false);
    const ScatteringResult& r = br.result;

    write_zeta(ctx.dir / "zeta.csv", r.traj.field);
    write_zeta(ctx.dir / "zeta_volterra.csv", r.volterra);
    write_picard(ctx.dir / "picard.csv", r.trace);
    write_trajectory(ctx.dir, r.traj, c.snapshot_stride);
    if (br.continuation) {
        write_continuation(ctx.dir / "continuation.csv", *br.continuation);
    }

    const NormReport M = functional_M(r.traj.field, c.lambda);
    const AInfinityReport ai = a_infinity_report(c.delta, c.T, c.d_t);
    std::optional<NormReport> N;
    std::string n_error;
    std::optional<AuditReport> audit;
    const double datum_norm = analytic_norm(br.sc.datum, c.lambda).value;
    const double eta_norm = profile_norm(br.sc.background, c.lambda);
    if (ai.a0 < c.lambda) {
        N = functional_N(r.traj, c.lambda, ai.weight);
        AuditParams ap{c.lambda, c.delta, c.epsilon, datum_norm, eta_norm, ai.a0};
        audit = audit_apriori(r.traj, r.traj.field, ai.weight, ap);
    } else {
        n_error = "lambda <= a_inf(0); the N functional has an empty domain";
    }

    std::string fit_error;
    const auto dist = distance_series(r.traj, br.sc.datum);
    write_distance(ctx.dir / "distance.csv", r.traj, br.sc.datum, dist, c.snapshot_stride);
    const auto fit = try_fit([&] { return fit_decay(r.traj.times, dist, fit_lo(c), fit_hi(c)); }, fit_error);
    std::string zfit_error;
    const auto zfit = try_fit([&] { return fit_decay(r.traj.field, fit_lo(c), fit_hi(c)); }, zfit_error);

    json j;
    j["datum_norm"] = datum_norm;
    j["eta_norm"] = eta_norm;
    j["M"] = norm_json(M);
    j["N"] = N ? norm_json(*N) : json{{"error", n_error}};
    j["a_infinity"] = {{"delta", c.delta}, {"a0", ai.a0}, {"positive", ai.positive}};
    if (audit) {
        j["audit"] = {{"field_constant", number_or_null(audit->field_constant)},
                      {"transport_constant", number_or_null(audit->transport_constant)},
                      {"finite", audit->finite}};
    }
    j["scattering_decay_fit"] = fit_json(fit, fit_error);
    j["field_decay_fit"] = fit_json(zfit, zfit_error);
    j["terminal_mismatch"] = r.traj.empty() ? kNaN : sup_distance(r.traj.back(), br.sc.datum);
    j["zero_mode_identity_defect"] = zero_mode_identity_defect(r, br.sc);
    j["stability_margin"] = r.stability_margin;
    j["picard"] = picard_json(r.trace);
    if (br.continuation) {
        json pairs = json::array();
        for (const auto& p : br.continuation->pairs) {
            pairs.push_back({{"T_short", p.T_short}, {"T_long", p.T_long}, {"zeta_diff", p.zeta_diff},
                             {"h_diff", p.h_diff}});
        }
        j["continuation"] = pairs;
    }
    write_json(ctx.dir / "norms.json", j);

    merge_truncation(ctx.truncation, r.traj.truncation);
    ctx.headline.converged = r.trace.converged;
    ctx.headline.lambda_fit = fit ? fit->rate : kNaN;
    ctx.headline.contraction_ratio = defined_max_ratio(r.trace);
    ctx.headline.M_norm = M.value;
    ctx.headline.N_norm = N ? N->value : kNaN;
    ctx.convergence = {{"picard_converged", r.trace.converged},
                       {"picard_diverged", r.trace.diverged},
                       {"iterations", r.trace.iterations()},
                       {"stop_reason", r.trace.stop_reason}};
}

void run_nonperturbative(const RunConfig& c, Context& ctx) {
    const BackwardRun br = solve_backward(c, true);
    const ScatteringResult& r = br.result;

    write_zeta(ctx.dir / "zeta.csv", r.traj.field);
    write_picard(ctx.dir / "picard.csv", r.trace);
    write_trajectory(ctx.dir, r.traj, c.snapshot_stride);
    {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < r.b1.size() && i < r.traj.field.size(); ++i) {
            rows.push_back({r.traj.field.t[i], r.b1[i].real(), r.b1[i].imag(), r.bm1[i].real(), r.bm1[i].imag()});
        }
        write_csv(ctx.dir / "echo_split.csv", {"t", "re_b1", "im_b1", "re_bm1", "im_bm1"}, rows);
    }

    json j;
    std::optional<NormReport> P;
    std::optional<NormReport> Q;
    if (c.tau > 0.0) {
        const double lp = c.effective_lambda_prime();
        const WeightFunction w = theta_weight(c.T, c.delta, c.d_t, lp, c.tau);
        const auto pq = functional_P_Q(r.traj.field, r.traj, c.lambda, lp, c.tau, w);
        P = pq.first;
        Q = pq.second;
        j["lambda_prime"] = lp;
        j["Delta"] = w.Delta;
        j["P"] = norm_json(*P);
        j["Q"] = norm_json(*Q);
    } else {
        j["P"] = json{{"error", "tau = 0: the Delta weight needs tau > 0"}};
        j["Q"] = json{{"error", "tau = 0: the Delta weight needs tau > 0"}};
    }
    j["datum_norm"] = analytic_norm(br.sc.datum, c.lambda).value;
    j["terminal_mismatch"] = r.traj.empty() ? kNaN : sup_distance(r.traj.back(), br.sc.datum);
    j["zero_mode_identity_defect"] = zero_mode_identity_defect(r, br.sc);
    j["boundary_max"] = r.traj.truncation.boundary_max;
    j["stability_margin"] = r.stability_margin;
    j["picard"] = picard_json(r.trace);
    write_json(ctx.dir / "norms.json", j);

    merge_truncation(ctx.truncation, r.traj.truncation);
    ctx.headline.converged = r.trace.converged;
    ctx.headline.contraction_ratio = defined_max_ratio(r.trace);
    ctx.headline.M_norm = P ? P->value : functional_M(r.traj.field, c.lambda).value;
    ctx.headline.N_norm = Q ? Q->value : kNaN;
    ctx.convergence = {{"picard_converged", r.trace.converged},
                       {"picard_diverged", r.trace.diverged},
                       {"iterations", r.trace.iterations()},
                       {"stop_reason", r.trace.stop_reason}};
}

void run_compare(const RunConfig& c, Context& ctx) {
    const BackwardRun br = solve_backward(c, false);
    const ScatteringResult& r = br.result;
    if (!r.trace.converged) {
        throw std::runtime_error("compare: backward Picard iteration did not converge (" + r.trace.stop_reason + ")");
    }
    std::optional<FourierField> rough;
    if (c.rough_width > 0.0) {
        DatumSpec s = datum_spec(c);
        s.width = c.rough_width;
        rough = make_asymptotic_datum(s, br.sc.datum.grid());
    }
    const ComparisonReport rep = compare_backward_forward(r, br.sc, c.cap, rough ? &*rough : nullptr);

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < rep.backward.t.size(); ++i) {
        const double fwd = i < rep.forward.mu_star.size() ? rep.forward.mu_star[i] : kNaN;
        rows.push_back({rep.backward.t[i], rep.backward.mu_star[i], fwd});
    }
    write_csv(ctx.dir / "regularity.csv", {"t", "mu_star_backward", "mu_star_forward"}, rows);
    write_zeta(ctx.dir / "zeta.csv", r.traj.field);
    write_picard(ctx.dir / "picard.csv", r.trace);

    json j;
    j["round_trip_error"] = rep.round_trip_error;
    j["round_trip_limit"] = rep.round_trip_limit;
    j["round_trip_ok"] = rep.round_trip_ok;
    j["cap"] = c.cap;
    j["rough_width"] = c.rough_width;
    j["backward"] = {{"increases", rep.backward.increases},
                     {"decreases", rep.backward.decreases},
                     {"nondecreasing", rep.backward_nondecreasing}};
    j["forward"] = {{"increases", rep.forward.increases},
                    {"decreases", rep.forward.decreases},
                    {"nonincreasing", rep.forward_nonincreasing}};
    j["picard"] = picard_json(r.trace);
    write_json(ctx.dir / "compare.json", j);

    merge_truncation(ctx.truncation, r.traj.truncation);
    ctx.headline.converged = r.trace.converged;
    ctx.headline.contraction_ratio = defined_max_ratio(r.trace);
    ctx.headline.M_norm = functional_M(r.traj.field, c.lambda).value;
    ctx.convergence = {{"picard_converged", r.trace.converged}, {"round_trip_ok", rep.round_trip_ok}};
}

void run_sweep(const RunConfig& c, Context& ctx) {
    const std::size_t n = c.sweep_values.size();
    std::vector<RunOutcome> outcomes(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < n; k = next++) {
            RunConfig member = c;
            member.scenario = c.sweep_base;
            member.sweep_base.clear();
            member.sweep_axis.clear();
            member.sweep_values.clear();
            set_value(member, c.sweep_axis, format_real(c.sweep_values[k]));
            member.id = "member_" + std::to_string(k);
            RunOptions opts;
            opts.out_root = ctx.dir;
            opts.threads = 1;
            try {
                outcomes[k] = run(member, opts);
            } catch (const std::exception& e) {
                outcomes[k].id = member.id;
                outcomes[k].error = e.what();
            }
        }
    };
    const int threads = std::max(1, std::min<int>(ctx.threads, static_cast<int>(n)));
    {
        std::vector<std::jthread> pool;
        for (int i = 1; i < threads; ++i) {
            pool.emplace_back(worker);
        }
        worker();
    }

    std::vector<std::vector<double>> rows;
    json members = json::array();
    std::optional<double> first_diverging;
    std::optional<double> smallest_converging;
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t k = 0; k < n; ++k) {
        const double v = c.sweep_values[k];
        const RunOutcome& o = outcomes[k];
        const Headline& h = o.headline;
        const bool conv = o.ok && h.converged;
        rows.push_back({v, conv ? 1.0 : 0.0, h.lambda_fit, h.contraction_ratio, h.M_norm, h.N_norm});
        members.push_back({{"axis_value", v},
                           {"dir", o.id},
                           {"status", o.ok ? "ok" : "failed"},
                           {"error", o.error},
                           {"converged", conv},
                           {"lambda_fit", number_or_null(h.lambda_fit)},
                           {"contraction_ratio", number_or_null(h.contraction_ratio)},
                           {"M_norm", number_or_null(h.M_norm)},
                           {"N_norm", number_or_null(h.N_norm)},
                           {"a_T0", number_or_null(h.a_T0)}});
        if (!conv && !first_diverging) {
            first_diverging = v;
        }
        if (conv && (!smallest_converging || v < *smallest_converging)) {
            smallest_converging = v;
        }
        if (o.ok && std::isfinite(h.a_T0) && h.a_T0 > 0.0 && v > 0.0) {
            lx.push_back(std::log(v));
            ly.push_back(std::log(h.a_T0));
        }
    }
    write_csv(ctx.dir / "sweep.csv",
              {"axis_value", "converged", "lambda_fit", "contraction_ratio", "M_norm", "N_norm"}, rows);

    json summary;
    summary["first_non_converging_value"] = first_diverging ? json(*first_diverging) : json(nullptr);
    summary["smallest_converging_value"] = smallest_converging ? json(*smallest_converging) : json(nullptr);
    if (lx.size() >= 2) {
        const double m = static_cast<double>(lx.size());
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i] / m;
            my += ly[i] / m;
        }
        double sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxx += (lx[i] - mx) * (lx[i] - mx);
            sxy += (lx[i] - mx) * (ly[i] - my);
        }
        summary["loglog_slope_a_T0"] = sxx > 0.0 ? json(sxy / sxx) : json(nullptr);
    }
    json j;
    j["base"] = c.sweep_base;
    j["axis"] = c.sweep_axis;
    j["values"] = c.sweep_values;
    j["members"] = members;
    j["summary"] = summary;
    write_json(ctx.dir / "sweep.json", j);

    std::size_t failures = 0;
    for (const auto& o : outcomes) {
        failures += o.ok ? 0 : 1;
    }
    ctx.headline.converged = failures == 0;
    ctx.convergence = {{"members", n}, {"failed_members", failures}};
}

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json list_files(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) {
            const fs::path rel = fs::relative(e.path(), dir);
            if (rel == "manifest.json" || rel.extension() == ".tmp") {
                continue;
            }
            files.push_back(rel);
        }
    }
    std::sort(files.begin(), files.end());
    json out = json::array();
    for (const auto& rel : files) {
        out.push_back({{"path", rel.generic_string()},
                       {"bytes", fs::file_size(dir / rel)},
                       {"sha256", sha256_file(dir / rel)}});
    }
    return out;
}

}  // namespace

std::string resolve_run_id(const RunConfig& config) {
    if (!config.id.empty()) {
        return config.id;
    }
    std::string canon;
    for (const auto& [k, v] : config_echo(config)) {
        canon += k + "=" + v + "\n";
    }
    return config.scenario + "-" + sha256_hex(canon).substr(0, 12);
}

RunOutcome run(const RunConfig& config, const RunOptions& options) {
    validate(config);
    RunOutcome outcome;
    outcome.id = resolve_run_id(config);
    outcome.dir = options.out_root / outcome.id;
    if (fs::exists(outcome.dir)) {
        if (!options.overwrite) {
            throw RunExists("run '" + outcome.id + "' already exists at " + outcome.dir.string() +
                            "; pass --overwrite to replace it");
        }
        fs::remove_all(outcome.dir);
    }
    fs::create_directories(outcome.dir);

    Context ctx;
    ctx.dir = outcome.dir;
    ctx.threads = std::max(1, options.threads);
    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const std::string& s = config.scenario;
        if (s == "stability") {
            run_stability(config, ctx);
        } else if (s == "bgk") {
            run_bgk(config, ctx);
        } else if (s == "weights") {
            run_weights(config, ctx);
        } else if (s == "forward") {
            run_forward(config, ctx);
        } else if (s == "backward") {
            run_backward(config, ctx);
        } else if (s == "nonperturbative") {
            run_nonperturbative(config, ctx);
        } else if (s == "compare") {
            run_compare(config, ctx);
        } else {
            run_sweep(config, ctx);
        }
        outcome.ok = true;
    } catch (const std::exception& e) {
        outcome.ok = false;
        outcome.error = e.what();
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    outcome.headline = ctx.headline;

    json echo = json::object();
    for (const auto& [k, v] : config_echo(config)) {
        echo[k] = v;
    }
    json m;
    m["run_id"] = outcome.id;
    m["scenario"] = config.scenario;
    m["status"] = outcome.ok ? "ok" : "failed";
    m["error"] = outcome.error;
    m["config"] = echo;
    m["versions"] = {{"hmf_lab", kVersion},
                     {"compiler", __VERSION__},
                     {"cxx_standard", static_cast<long>(__cplusplus)},
                     {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                     {"openssl", OPENSSL_VERSION_TEXT}};
    m["timings"] = {{"started_utc", started}, {"wall_seconds", wall}, {"threads", ctx.threads}};
    m["truncation"] = {{"out_of_range_reads", ctx.truncation.out_of_range_reads},
                       {"boundary_max", ctx.truncation.boundary_max}};
    m["convergence"] = ctx.convergence;
    m["headline"] = {{"converged", ctx.headline.converged},
                     {"lambda_fit", number_or_null(ctx.headline.lambda_fit)},
                     {"contraction_ratio", number_or_null(ctx.headline.contraction_ratio)},
                     {"M_norm", number_or_null(ctx.headline.M_norm)},
                     {"N_norm", number_or_null(ctx.headline.N_norm)}};
    m["files"] = list_files(outcome.dir);
    write_atomic(outcome.dir / "manifest.json", m.dump(2) + "\n");
    return outcome;
}

}  // namespace hmf
