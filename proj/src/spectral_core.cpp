#include "hmf/spectral_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hmf {

namespace {

struct Stencil {
    long base;      // node index of the first stencil point
    double w[4];
};

// Cubic Lagrange weights for nodes -1, 0, 1, 2 at fractional offset f in [0, 1).
Stencil make_stencil(double position) {
    const double fl = std::floor(position);
    const double f = position - fl;
    Stencil s{};
    s.base = static_cast<long>(fl) - 1;
    s.w[0] = -f * (f - 1.0) * (f - 2.0) / 6.0;
    s.w[1] = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
    s.w[2] = -(f + 1.0) * f * (f - 2.0) / 2.0;
    s.w[3] = (f + 1.0) * f * (f - 1.0) / 6.0;
    return s;
}

}  // namespace

Grid make_grid(int n_max, double xi_max, double d_xi, double t_final) {
    if (n_max < 2) {
        throw std::invalid_argument("make_grid: n_max must be >= 2");
    }
    if (!(d_xi > 0.0)) {
        throw std::invalid_argument("make_grid: d_xi must be positive");
    }
    if (!(t_final >= 0.0)) {
        throw std::invalid_argument("make_grid: t_final must be non-negative");
    }
    if (xi_max < t_final + 4.0) {
        throw std::invalid_argument("make_grid: horizon exceeds grid (xi_max = " + std::to_string(xi_max) +
                                    " < t_final + 4 = " + std::to_string(t_final + 4.0) + ")");
    }
    Grid g;
    g.n_max = n_max;
    g.d_xi = d_xi;
    g.t_final = t_final;
    g.half_nodes = static_cast<int>(std::floor(xi_max / d_xi + 1e-9));
    g.xi_max = g.half_nodes * d_xi;
    return g;
}

FourierField::FourierField(const Grid& grid) : grid_(grid), coeffs_(grid.size(), cplx{}) {}

double FourierField::sup_abs() const noexcept {
    double m = 0.0;
    for (const auto& c : coeffs_) {
        m = std::max(m, std::abs(c));
    }
    return m;
}

FourierField& FourierField::operator+=(const FourierField& other) {
    if (!(grid_ == other.grid_)) {
        throw std::invalid_argument("FourierField: grid mismatch");
    }
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        coeffs_[i] += other.coeffs_[i];
    }
    return *this;
}

FourierField& FourierField::operator-=(const FourierField& other) {
    if (!(grid_ == other.grid_)) {
        throw std::invalid_argument("FourierField: grid mismatch");
    }
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        coeffs_[i] -= other.coeffs_[i];
    }
    return *this;
}

FourierField& FourierField::operator*=(double s) {
    for (auto& c : coeffs_) {
        c *= s;
    }
    return *this;
}

void FourierField::axpy(cplx s, const FourierField& other) {
    if (!(grid_ == other.grid_)) {
        throw std::invalid_argument("FourierField: grid mismatch");
    }
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        coeffs_[i] += s * other.coeffs_[i];
    }
}

double sup_distance(const FourierField& a, const FourierField& b) {
    if (!(a.grid() == b.grid())) {
        throw std::invalid_argument("sup_distance: grid mismatch");
    }
    const auto ca = a.coeffs();
    const auto cb = b.coeffs();
    double m = 0.0;
    for (std::size_t i = 0; i < ca.size(); ++i) {
        m = std::max(m, std::abs(ca[i] - cb[i]));
    }
    return m;
}

void TruncationStats::merge(const TruncationStats& other) noexcept {
    out_of_range_reads += other.out_of_range_reads;
    boundary_max = std::max(boundary_max, other.boundary_max);
}

cplx eval_shifted(const FourierField& field, int n, double xi, TruncationStats* stats) {
    const Grid& g = field.grid();
    if (!field.has_mode(n)) {
        return {};
    }
    if (std::abs(xi) > g.xi_max) {
        if (stats != nullptr) {
            ++stats->out_of_range_reads;
        }
        return {};
    }
    const auto row = field.row(n);
    const Stencil s = make_stencil(xi / g.d_xi + g.half_nodes);
    const long count = static_cast<long>(row.size());
    cplx acc{};
    for (int r = 0; r < 4; ++r) {
        const long idx = s.base + r;
        if (idx >= 0 && idx < count && s.w[r] != 0.0) {
            acc += s.w[r] * row[static_cast<std::size_t>(idx)];
        }
    }
    return acc;
}

void shifted_row(const FourierField& field, int n, double shift, std::span<cplx> out) {
    const Grid& g = field.grid();
    const long count = static_cast<long>(g.xi_count());
    if (!field.has_mode(n)) {
        std::fill(out.begin(), out.end(), cplx{});
        return;
    }
    const auto row = field.row(n);
    // Target xi_j - shift sits at fractional index j - shift/d_xi.
    const Stencil s = make_stencil(-shift / g.d_xi);
    // Nodes whose target lies outside [-xi_max, xi_max] are truncated to zero.
    const double lo_target = -g.xi_max + shift;  // xi_j >= lo_target
    const double hi_target = g.xi_max + shift;
    for (long j = 0; j < count; ++j) {
        const double xj = g.xi(static_cast<std::size_t>(j));
        if (xj < lo_target - 1e-12 || xj > hi_target + 1e-12) {
            out[static_cast<std::size_t>(j)] = {};
            continue;
        }
        cplx acc{};
        for (int r = 0; r < 4; ++r) {
            const long idx = j + s.base + r;
            if (idx >= 0 && idx < count) {
                acc += s.w[r] * row[static_cast<std::size_t>(idx)];
            }
        }
        out[static_cast<std::size_t>(j)] = acc;
    }
}

FourierField enforce_reality(const FourierField& field) {
    FourierField out(field.grid());
    const Grid& g = field.grid();
    const std::size_t nx = g.xi_count();
    for (int n = -g.n_max; n <= g.n_max; ++n) {
        for (std::size_t j = 0; j < nx; ++j) {
            const cplx a = field.at(n, j);
            const cplx b = std::conj(field.at(-n, nx - 1 - j));
            out.at(n, j) = 0.5 * (a + b);
        }
    }
    return out;
}

double reality_defect(const FourierField& field) {
    const Grid& g = field.grid();
    const std::size_t nx = g.xi_count();
    double m = 0.0;
    for (int n = -g.n_max; n <= g.n_max; ++n) {
        for (std::size_t j = 0; j < nx; ++j) {
            m = std::max(m, std::abs(field.at(-n, nx - 1 - j) - std::conj(field.at(n, j))));
        }
    }
    return m;
}

PhysicalSamples to_physical(const FourierField& field, std::size_t nx, std::size_t nv, double v_max) {
    const Grid& g = field.grid();
    PhysicalSamples out;
    out.x.resize(nx);
    out.v.resize(nv);
    out.values.assign(nx * nv, 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
        out.x[i] = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(nx);
    }
    for (std::size_t i = 0; i < nv; ++i) {
        out.v[i] = nv == 1 ? 0.0 : -v_max + 2.0 * v_max * static_cast<double>(i) / static_cast<double>(nv - 1);
    }

    // Velocity transform per mode: G_n(v) = int e^{iv xi} g_n(xi) dxi (trapezoid).
    const std::size_t nxi = g.xi_count();
    std::vector<cplx> gv(static_cast<std::size_t>(g.modes()) * nv);
    for (int n = -g.n_max; n <= g.n_max; ++n) {
        const auto row = field.row(n);
        for (std::size_t iv = 0; iv < nv; ++iv) {
            const double v = out.v[iv];
            cplx acc{};
            for (std::size_t j = 0; j < nxi; ++j) {
                const double w = (j == 0 || j + 1 == nxi) ? 0.5 : 1.0;
                acc += w * std::polar(1.0, v * g.xi(j)) * row[j];
            }
            gv[g.mode_index(n) * nv + iv] = acc * g.d_xi;
        }
    }

    double residue = 0.0;
    for (std::size_t ix = 0; ix < nx; ++ix) {
        for (std::size_t iv = 0; iv < nv; ++iv) {
            cplx acc{};
            for (int n = -g.n_max; n <= g.n_max; ++n) {
                acc += std::polar(1.0, n * out.x[ix]) * gv[g.mode_index(n) * nv + iv];
            }
            acc /= 2.0 * std::numbers::pi;
            out.values[ix * nv + iv] = acc.real();
            residue = std::max(residue, std::abs(acc.imag()));
        }
    }
    out.max_imag_residue = residue;
    return out;
}

}  // namespace hmf
