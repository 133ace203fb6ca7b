#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tubeh/errors.hpp"
#include "tubeh/fft.hpp"
#include "tubeh/math.hpp"

namespace tubeh {

inline constexpr std::size_t kDefaultGridBudget = std::size_t{1} << 24;

inline std::atomic<std::size_t>& grid_budget_setting() {
    static std::atomic<std::size_t> b{kDefaultGridBudget};
    return b;
}
inline void set_grid_budget(std::size_t b) { grid_budget_setting() = b; }
inline std::size_t grid_budget() { return grid_budget_setting(); }

/// Uniform grid on [-L/2, L/2)^n with N points per axis.
struct GridSpec {
    int dim = 1;
    std::size_t points = 8;
    double extent = 1.0;

    static GridSpec make(int n, std::size_t N, double L) {
        GridSpec g{n, N, L};
        g.validate();
        return g;
    }

    void validate() const {
        if (dim < 1 || dim > kMaxDim) fail(ErrorKind::InvalidGrid, "grid dimension must be 1..3");
        if (points < 8 || (points & (points - 1)) != 0)
            fail(ErrorKind::InvalidGrid, "points per axis must be a power of two >= 8");
        if (!(extent > 0) || !std::isfinite(extent)) fail(ErrorKind::InvalidGrid, "extent must be positive");
        double total = 1.0;
        for (int a = 0; a < dim; ++a) total *= static_cast<double>(points);
        if (total > static_cast<double>(grid_budget()))
            fail(ErrorKind::InvalidGrid, "grid exceeds point budget of " + std::to_string(grid_budget()));
    }

    double spacing() const { return extent / static_cast<double>(points); }
    double origin() const { return -0.5 * extent; }
    double cell_volume() const { return std::pow(spacing(), dim); }
    std::size_t total() const {
        std::size_t t = 1;
        for (int a = 0; a < dim; ++a) t *= points;
        return t;
    }
    std::vector<std::size_t> shape() const { return std::vector<std::size_t>(dim, points); }
    double coordinate(std::size_t k) const { return origin() + static_cast<double>(k) * spacing(); }

    /// Multi-index of a row-major flat index; axis 0 varies slowest.
    std::array<std::size_t, kMaxDim> index(std::size_t flat) const {
        std::array<std::size_t, kMaxDim> idx{};
        for (int a = dim - 1; a >= 0; --a) {
            idx[a] = flat % points;
            flat /= points;
        }
        return idx;
    }
    RVec point(std::size_t flat) const {
        const auto idx = index(flat);
        RVec p(dim);
        for (int a = 0; a < dim; ++a) p[a] = coordinate(idx[a]);
        return p;
    }
    /// Grid on the other side of the transform: spacing 1/L, extent N/L.
    GridSpec dual() const { return GridSpec{dim, points, static_cast<double>(points) / extent}; }

    friend bool operator==(const GridSpec& a, const GridSpec& b) {
        return a.dim == b.dim && a.points == b.points && a.extent == b.extent;
    }
};

enum class Side { Physical, Frequency };

inline Side flip(Side s) { return s == Side::Physical ? Side::Frequency : Side::Physical; }

/**
 * @brief Samples of a map R^n -> C^d on a uniform grid.
 *
 * Storage is [point][channel] with points in row-major multi-index order.
 */
class GridField {
public:
    GridField() = default;
    GridField(const GridSpec& spec, std::size_t value_dim, Side side = Side::Physical)
        : spec_(spec), d_(value_dim), side_(side), data_(spec.total() * value_dim) {
        spec_.validate();
        if (value_dim < 1) fail(ErrorKind::InvalidGrid, "value dimension must be >= 1");
    }

    /// Fills every point from fn(point, out) where out has d entries.
    static GridField from_function(const GridSpec& spec, std::size_t value_dim, Side side,
                                   const std::function<void(const RVec&, std::span<cplx>)>& fn) {
        GridField f(spec, value_dim, side);
        parallel_for(spec.total(), [&](std::size_t i) { fn(spec.point(i), f.values(i)); });
        return f;
    }

    const GridSpec& spec() const { return spec_; }
    std::size_t value_dim() const { return d_; }
    Side side() const { return side_; }
    void set_side(Side s) { side_ = s; }
    std::size_t size() const { return spec_.total(); }

    std::span<cplx> values(std::size_t i) { return {data_.data() + i * d_, d_}; }
    std::span<const cplx> values(std::size_t i) const { return {data_.data() + i * d_, d_}; }
    cplx& at(std::size_t i, std::size_t c) { return data_[i * d_ + c]; }
    cplx at(std::size_t i, std::size_t c) const { return data_[i * d_ + c]; }
    std::vector<cplx>& raw() { return data_; }
    const std::vector<cplx>& raw() const { return data_; }

    /// Euclidean norm of the value at point i.
    double value_norm(std::size_t i) const {
        double s = 0.0;
        for (std::size_t c = 0; c < d_; ++c) s += std::norm(data_[i * d_ + c]);
        return std::sqrt(s);
    }

    GridField& operator+=(const GridField& o) {
        check_compatible(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    GridField& operator-=(const GridField& o) {
        check_compatible(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    GridField& operator*=(cplx a) {
        for (auto& v : data_) v *= a;
        return *this;
    }
    friend GridField operator+(GridField a, const GridField& b) { return a += b; }
    friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
    friend GridField operator*(cplx a, GridField f) { return f *= a; }

    bool all_finite() const {
        for (const auto& v : data_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

private:
    void check_compatible(const GridField& o) const {
        if (!(spec_ == o.spec_) || d_ != o.d_) fail(ErrorKind::InvalidGrid, "incompatible grid fields");
    }

    GridSpec spec_;
    std::size_t d_ = 1;
    Side side_ = Side::Physical;
    std::vector<cplx> data_;
};

/// Riemann-sum L^p norm of the pointwise Euclidean norm; p = inf gives the max.
inline double lp_norm(const GridField& f, double p) {
    if (!(p >= 1.0)) fail(ErrorKind::InvalidP, "p must be >= 1, got " + format_p(p));
    const std::size_t n = f.size();
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, f.value_norm(i));
        return m;
    }
    // scale by the max first so large p cannot overflow
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, f.value_norm(i));
    if (m == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::pow(f.value_norm(i) / m, p);
    return m * std::pow(s * f.spec().cell_volume(), 1.0 / p);
}

namespace detail {

// sum_k (-1)^k-phased DFT scaled by the input spacing; see dft_forward.
inline GridField centered_transform(const GridField& f, int sign) {
    const GridSpec& g = f.spec();
    GridField out(g.dual(), f.value_dim(), flip(f.side()));
    auto& data = out.raw();
    data = f.raw();
    const std::size_t d = f.value_dim();
    auto apply_phase = [&] {
        for (std::size_t i = 0; i < g.total(); ++i) {
            const auto idx = g.index(i);
            std::size_t parity = 0;
            for (int a = 0; a < g.dim; ++a) parity += idx[a];
            if (parity & 1)
                for (std::size_t c = 0; c < d; ++c) data[i * d + c] = -data[i * d + c];
        }
    };
    apply_phase();
    fft::transform_all(data, g.shape(), d, sign);
    apply_phase();
    const double scale = g.cell_volume();
    for (auto& v : data) v *= scale;
    return out;
}

}  // namespace detail

/**
 * @brief F[f](x) = int exp(+2 pi i <x,t>) f(t) dt on the dual grid.
 *
 * With t_k = -L/2 + k L/N and x_m = -N/(2L) + m/L the kernel factors as
 * (-1)^{k+m} exp(2 pi i m k / N) because N is a multiple of 4, so the
 * continuum transform is a phased unnormalized DFT scaled by the spacing.
 */
inline GridField dft_forward(const GridField& f) { return detail::centered_transform(f, +1); }

/// F^{-1}[f](t) = int exp(-2 pi i <x,t>) f(x) dx; exact inverse of dft_forward on the grid.
inline GridField dft_inverse(const GridField& f) { return detail::centered_transform(f, -1); }

/// Relative deviation between the L^2 norms of f and its transform.
inline double parseval_check(const GridField& f) {
    const double a = lp_norm(f, 2.0);
    if (a == 0.0) fail(ErrorKind::ZeroField, "Parseval check on a zero field");
    return std::abs(lp_norm(dft_forward(f), 2.0) - a) / a;
}

struct HausdorffYoung {
    double lhs;
    double rhs;
    double ratio;
};

/// ||F f||_q against ||f||_p for p in [1, 2] with q the conjugate exponent.
inline HausdorffYoung hausdorff_young_check(const GridField& f, double p) {
    if (!(p >= 1.0 && p <= 2.0)) fail(ErrorKind::InvalidP, "Fourier type exponent must lie in [1,2]");
    const double rhs = lp_norm(f, p);
    if (rhs == 0.0) fail(ErrorKind::ZeroField, "Hausdorff-Young check on a zero field");
    const double lhs = lp_norm(dft_forward(f), conjugate_exponent(p));
    return {lhs, rhs, lhs / rhs};
}

}  // namespace tubeh
