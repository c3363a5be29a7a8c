// Truncated Fourier representation of phase-space functions on S^1 x R.
//
// A function g(x, v) is stored through its coefficients
//
//     g_n(xi) = (1/2pi) * int e^{-inx} e^{-iv xi} g(x, v) dx dv
//
// for modes |n| <= n_max and a uniform, symmetric frequency grid
// xi_j = (j - K) * d_xi, j = 0 .. 2K.  Off-grid reads use 4-point cubic
// Lagrange interpolation and vanish outside [-xi_max, xi_max].
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hmf {

using cplx = std::complex<double>;

struct Grid {
    int n_max = 0;
    double xi_max = 0.0;   // effective cutoff, K * d_xi
    double d_xi = 0.0;
    double t_final = 0.0;
    int half_nodes = 0;    // K

    [[nodiscard]] int modes() const noexcept { return 2 * n_max + 1; }
    [[nodiscard]] std::size_t xi_count() const noexcept { return 2 * static_cast<std::size_t>(half_nodes) + 1; }
    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(modes()) * xi_count(); }
    [[nodiscard]] double xi(std::size_t j) const noexcept {
        return (static_cast<double>(j) - half_nodes) * d_xi;
    }
    [[nodiscard]] std::size_t mode_index(int n) const noexcept { return static_cast<std::size_t>(n + n_max); }

    friend bool operator==(const Grid&, const Grid&) = default;
};

/// Validated grid. Rejects xi_max < t_final + 4, since field extraction
/// samples xi = +-t and the interpolation stencil needs a margin.
Grid make_grid(int n_max, double xi_max, double d_xi, double t_final);

class FourierField {
public:
    FourierField() = default;
    explicit FourierField(const Grid& grid);

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }

    [[nodiscard]] cplx at(int n, std::size_t j) const { return coeffs_[offset(n) + j]; }
    cplx& at(int n, std::size_t j) { return coeffs_[offset(n) + j]; }

    [[nodiscard]] std::span<const cplx> row(int n) const {
        return {coeffs_.data() + offset(n), grid_.xi_count()};
    }
    std::span<cplx> row(int n) { return {coeffs_.data() + offset(n), grid_.xi_count()}; }

    [[nodiscard]] std::span<const cplx> coeffs() const noexcept { return coeffs_; }
    std::span<cplx> coeffs() noexcept { return coeffs_; }

    [[nodiscard]] bool has_mode(int n) const noexcept { return n >= -grid_.n_max && n <= grid_.n_max; }

    /// Largest |coefficient|.
    [[nodiscard]] double sup_abs() const noexcept;

    FourierField& operator+=(const FourierField& other);
    FourierField& operator-=(const FourierField& other);
    FourierField& operator*=(double s);
    /// this += s * other
    void axpy(cplx s, const FourierField& other);

private:
    [[nodiscard]] std::size_t offset(int n) const noexcept {
        return grid_.mode_index(n) * grid_.xi_count();
    }

    Grid grid_{};
    std::vector<cplx> coeffs_;
};

/// Sup-norm of the coefficient difference. Grids must match.
double sup_distance(const FourierField& a, const FourierField& b);

/// Counts reads that fell outside the stored frequency window.
struct TruncationStats {
    std::uint64_t out_of_range_reads = 0;
    double boundary_max = 0.0;  // max |coefficient| seen on the two outermost nodes of any row

    void merge(const TruncationStats& other) noexcept;
};

/// g_n(xi) at an arbitrary frequency by cubic interpolation; 0 when
/// |xi| > xi_max or |n| > n_max.
cplx eval_shifted(const FourierField& field, int n, double xi, TruncationStats* stats = nullptr);

/// Writes out[j] = g_n(xi_j - shift) for every node j. All nodes share one
/// set of interpolation weights, so this is the fast path for the free-flow
/// shifts xi - k t.
void shifted_row(const FourierField& field, int n, double shift, std::span<cplx> out);

/// Averages each conjugate pair so that g_{-n}(-xi) = conj(g_n(xi)) holds exactly.
FourierField enforce_reality(const FourierField& field);

/// max |g_{-n}(-xi) - conj(g_n(xi))|
double reality_defect(const FourierField& field);

struct PhysicalSamples {
    std::vector<double> x;       // nx nodes on [0, 2pi)
    std::vector<double> v;       // nv nodes on [-v_max, v_max]
    std::vector<double> values;  // row-major (x outer, v inner)
    double max_imag_residue = 0.0;

    [[nodiscard]] double at(std::size_t ix, std::size_t iv) const { return values[ix * v.size() + iv]; }
};

/// Inverse transform g(x, v) = (1/2pi) sum_n int e^{inx} e^{iv xi} g_n(xi) dxi,
/// with the xi-integral done by the trapezoid rule on the stored nodes.
PhysicalSamples to_physical(const FourierField& field, std::size_t nx, std::size_t nv, double v_max);

}  // namespace hmf
