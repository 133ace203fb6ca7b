#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "tubeh/cone_geometry.hpp"
#include "tubeh/fft.hpp"
#include "tubeh/grid_field.hpp"
#include "tubeh/kernels.hpp"

namespace tubeh {

using CVec = std::vector<cplx>;

inline double value_norm(const CVec& v) {
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return std::sqrt(s);
}

namespace detail {

template <class Kernel>
CVec integrate_against(const GridField& h, Kernel&& k) {
    const GridSpec& g = h.spec();
    const std::size_t d = h.value_dim();
    const std::size_t rows = g.points, per = g.total() / g.points;
    std::vector<CVec> partial(rows, CVec(d));
    parallel_for(rows, [&](std::size_t r) {
        for (std::size_t j = 0; j < per; ++j) {
            const std::size_t i = r * per + j;
            const cplx w = k(g.point(i));
            for (std::size_t c = 0; c < d; ++c) partial[r][c] += h.at(i, c) * w;
        }
    });
    CVec out(d);
    for (const auto& p : partial)
        for (std::size_t c = 0; c < d; ++c) out[c] += p[c];
    for (auto& v : out) v *= g.cell_volume();
    return out;
}

}  // namespace detail

/// Riemann sum of h(t) Q(z; t); `tail_tolerance` > 0 enables the truncation guard.
inline CVec poisson_integral(const GridField& h, const TubePoint& z, const KernelEvaluator& E,
                             double tail_tolerance = 0.0) {
    if (tail_tolerance > 0) {
        const double tail = poisson_tail_estimate(E, z, h.spec());
        if (tail > tail_tolerance) fail(ErrorKind::TailTooFat, "kernel mass outside the grid " + std::to_string(tail));
    }
    const double k2 = E.k2iy(z.y());
    return detail::integrate_against(h, [&](const RVec& t) { return cplx(E.poisson_offset(z.x() - t, z.y(), k2)); });
}

/// Riemann sum of h(t) K(z - t).
inline CVec cauchy_integral(const GridField& h, const TubePoint& z, const KernelEvaluator& E,
                            double tail_tolerance = 0.0) {
    if (tail_tolerance > 0) {
        const double tail = poisson_tail_estimate(E, z, h.spec());
        if (tail > tail_tolerance) fail(ErrorKind::TailTooFat, "kernel mass outside the grid " + std::to_string(tail));
    }
    return detail::integrate_against(h, [&](const RVec& t) { return E.cauchy(z, t); });
}

/**
 * @brief out(x_i) = sum_k h(t_k) kernel(x_i - t_k) Delta^n for every grid point.
 *
 * Linear convolution through zero padding to 2N per axis, so it equals the
 * direct Riemann sum up to rounding.
 */
inline GridField convolve_grid(const GridField& h, const std::function<cplx(const RVec&)>& kernel) {
    const GridSpec& g = h.spec();
    const int n = g.dim;
    const std::size_t N = g.points, M = 2 * N, d = h.value_dim();
    std::size_t total = 1;
    for (int a = 0; a < n; ++a) total *= M;
    const std::vector<std::size_t> shape(n, M);
    auto unflatten = [&](std::size_t flat) {
        std::array<std::size_t, kMaxDim> idx{};
        for (int a = n - 1; a >= 0; --a) {
            idx[a] = flat % M;
            flat /= M;
        }
        return idx;
    };

    std::vector<cplx> K(total);
    parallel_for(total, [&](std::size_t i) {
        const auto idx = unflatten(i);
        RVec u(n);
        for (int a = 0; a < n; ++a) {
            const long long j = idx[a] < N ? static_cast<long long>(idx[a]) : static_cast<long long>(idx[a]) - static_cast<long long>(M);
            u[a] = static_cast<double>(j) * g.spacing();
        }
        K[i] = kernel(u);
    });
    std::vector<cplx> H(total * d);
    for (std::size_t i = 0; i < g.total(); ++i) {
        const auto idx = g.index(i);
        std::size_t flat = 0;
        for (int a = 0; a < n; ++a) flat = flat * M + idx[a];
        for (std::size_t c = 0; c < d; ++c) H[flat * d + c] = h.at(i, c);
    }
    fft::transform_all(K, shape, 1, -1);
    fft::transform_all(H, shape, d, -1);
    for (std::size_t i = 0; i < total; ++i)
        for (std::size_t c = 0; c < d; ++c) H[i * d + c] *= K[i];
    fft::transform_all(H, shape, d, +1);

    GridField out(g, d, h.side());
    const double scale = g.cell_volume() / static_cast<double>(total);
    for (std::size_t i = 0; i < g.total(); ++i) {
        const auto idx = g.index(i);
        std::size_t flat = 0;
        for (int a = 0; a < n; ++a) flat = flat * M + idx[a];
        for (std::size_t c = 0; c < d; ++c) out.at(i, c) = H[flat * d + c] * scale;
    }
    return out;
}

/// f(. + iy) = P_y h on the grid of h.
inline GridField poisson_slice(const GridField& h, const RVec& y, const KernelEvaluator& E) {
    TubePoint::make(E.cone(), RVec(E.dim()), y);
    const double k2 = E.k2iy(y);
    return convolve_grid(h, [&](const RVec& u) { return cplx(E.poisson_offset(u, y, k2)); });
}

/// Cauchy integral of h on the slice Im z = y.
inline GridField cauchy_slice(const GridField& h, const RVec& y, const KernelEvaluator& E) {
    TubePoint::make(E.cone(), RVec(E.dim()), y);
    return convolve_grid(h, [&](const RVec& u) { return E.cauchy_offset(u, y); });
}

struct SliceNorm {
    RVec y;
    double norm;
};

/** @brief Slice norms of the Poisson extension and their supremum A. */
struct HardyProfile {
    double p = 2.0;
    std::vector<SliceNorm> slices;
    double sup = 0.0;
    std::vector<double> subcone_sups;
    std::vector<SliceNorm> boundary_slices;
    double direct_sup = 0.0;
};

inline HardyProfile hardy_profile(const GridField& h, double p, const KernelEvaluator& E,
                                  const std::vector<RVec>& y_list) {
    if (!(p >= 1.0)) fail(ErrorKind::InvalidP, "p must be >= 1");
    HardyProfile prof;
    prof.p = p;
    for (const auto& y : y_list) {
        const double v = lp_norm(poisson_slice(h, y, E), p);
        prof.slices.push_back({y, v});
        prof.sup = std::max(prof.sup, v);
    }
    prof.direct_sup = prof.sup;
    return prof;
}

struct ConvergenceRow {
    double y_norm;
    double error;
};

/** @brief Errors |f(. + iy) - h| along a sequence y -> 0. */
struct ConvergenceTable {
    double p = 2.0;
    std::vector<ConvergenceRow> rows;
    double fitted_order = 0.0;

    /// Each error at most (1 + slack) times its predecessor.
    bool decreasing(double slack) const {
        for (std::size_t k = 1; k < rows.size(); ++k)
            if (rows[k].error > (1.0 + slack) * rows[k - 1].error) return false;
        return true;
    }
    double final_error() const { return rows.empty() ? 0.0 : rows.back().error; }
};

/// Least-squares slope of log(error) against log(|y|) over rows with positive error.
inline double fit_order(const std::vector<ConvergenceRow>& rows) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& r : rows) {
        if (!(r.error > 0)) continue;
        const double x = std::log(r.y_norm), y = std::log(r.error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 2) return 0.0;
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

namespace detail {

inline void check_decreasing_norms(const std::vector<RVec>& ys) {
    for (std::size_t k = 1; k < ys.size(); ++k)
        if (!(ys[k].norm() < ys[k - 1].norm())) fail(ErrorKind::NotConverging, "|y| must strictly decrease");
}

inline ConvergenceTable finish_table(ConvergenceTable t) {
    t.fitted_order = fit_order(t.rows);
    if (t.rows.size() >= 2 && t.rows.back().error > t.rows.front().error)
        fail(ErrorKind::NotConverging, "final error exceeds the first one");
    return t;
}

}  // namespace detail

inline ConvergenceTable boundary_convergence(const GridField& h, double p, const KernelEvaluator& E,
                                             const std::vector<RVec>& y_seq) {
    if (!(p >= 1.0) || std::isinf(p)) fail(ErrorKind::InvalidP, "strong convergence needs p in [1, inf)");
    detail::check_decreasing_norms(y_seq);
    ConvergenceTable t;
    t.p = p;
    for (const auto& y : y_seq) t.rows.push_back({y.norm(), lp_norm(poisson_slice(h, y, E) - h, p)});
    return detail::finish_table(std::move(t));
}

/// 16 fixed smooth test fields: modulated Gaussians of varying centre and width.
inline std::vector<GridField> weak_star_test_fields(const GridSpec& g) {
    std::vector<GridField> out;
    const double L = g.extent;
    for (int k = 0; k < 16; ++k) {
        const double width = 0.5 + 0.25 * (k % 4);
        const double centre = L * (-0.2 + 0.4 * ((k * 7) % 16) / 15.0) * 0.5;
        const double freq = 0.25 * (k % 3);
        out.push_back(GridField::from_function(g, 1, Side::Physical, [&](const RVec& t, std::span<cplx> v) {
            double r2 = 0.0, phase = 0.0;
            for (int a = 0; a < t.size(); ++a) {
                r2 += (t[a] - centre) * (t[a] - centre);
                phase += freq * t[a];
            }
            v[0] = std::exp(-kPi * r2 / (width * width)) * std::polar(1.0, kTwoPi * phase);
        }));
    }
    return out;
}

/// Max over the test fields of the norm of the pairing of f(. + iy) - h; the
/// weak-star form of the boundary limit for bounded data.
inline ConvergenceTable weak_star_convergence(const GridField& h, const KernelEvaluator& E,
                                              const std::vector<RVec>& y_seq) {
    detail::check_decreasing_norms(y_seq);
    const auto tests = weak_star_test_fields(h.spec());
    ConvergenceTable t;
    t.p = std::numeric_limits<double>::infinity();
    for (const auto& y : y_seq) {
        const GridField diff = poisson_slice(h, y, E) - h;
        double worst = 0.0;
        for (const auto& phi : tests) {
            CVec acc(h.value_dim());
            for (std::size_t i = 0; i < h.size(); ++i)
                for (std::size_t c = 0; c < h.value_dim(); ++c) acc[c] += diff.at(i, c) * phi.at(i, 0);
            worst = std::max(worst, value_norm(acc) * h.spec().cell_volume());
        }
        t.rows.push_back({y.norm(), worst});
    }
    return detail::finish_table(std::move(t));
}

/** @brief Growth of the Poisson extension on a compact subcone against the assembled constant. */
struct GrowthReport {
    double p = 2.0;
    double measured = 0.0;  // sup N(f(z)) |y|^{n/p} / |h|_p, or sup N(f(z)) / |h|_p for p > 2
    double bound = 0.0;
    std::size_t probes = 0;
    bool holds() const { return measured <= bound; }
};

/// M(C') for 1 < p <= 2 from ||Q||_q = ||K||_{2q}^2 / K(2iy) and the Cauchy L^q bound.
inline double growth_constant(int n, double p, double delta, double B) {
    const double q = conjugate_exponent(p);
    const double pp = 2.0 * q / (2.0 * q - 1.0);
    return std::pow(unit_sphere_area(n) * factorial(n - 1) / std::pow(kTwoPi * pp * delta, n), 1.0 + 1.0 / p) / B;
}

/// M(C', r) for 2 < p < inf from ||Q||_q <= ||Q||_inf^{1/p} with unit mass.
inline double growth_constant_truncated(int n, double p, double delta, double B, double r) {
    const double c = unit_sphere_area(n) * factorial(n - 1) * std::pow(delta, -n);
    return std::pow(c * c / B, 1.0 / p) * std::pow(r, -n / p);
}

inline GrowthReport growth_bound_check(const GridField& h, double p, const KernelEvaluator& E,
                                       const CompactSubcone& Cp, const std::vector<TubePoint>& z_list) {
    if (!(p > 1.0) || std::isinf(p)) fail(ErrorKind::InvalidP, "growth bound needs 1 < p < inf");
    const int n = E.dim();
    const double hp = lp_norm(h, p);
    if (hp == 0.0) fail(ErrorKind::ZeroField, "growth bound on a zero field");
    const double delta = Cp.delta(), B = b_constant(E);
    GrowthReport rep;
    rep.p = p;
    if (p <= 2.0) {
        rep.bound = growth_constant(n, p, delta, B);
    } else {
        if (!(Cp.radius() > 0)) fail(ErrorKind::DegenerateSubcone, "p > 2 growth bound needs exclusion radius r > 0");
        rep.bound = growth_constant_truncated(n, p, delta, B, Cp.radius());
    }
    for (const auto& z : z_list) {
        if (!Cp.contains(z.y())) fail(ErrorKind::PointOutsideTube, "probe outside the truncated subcone");
        const double v = value_norm(poisson_integral(h, z, E)) / hp;
        rep.measured = std::max(rep.measured, p <= 2.0 ? v * std::pow(z.y().norm(), n / p) : v);
        ++rep.probes;
    }
    return rep;
}

/**
 * @brief Hardy sup assembled from the n-rant pieces S_j of C.
 *
 * A_j is the largest slice norm over imaginary parts drawn from S_j, A is the
 * max of the A_j, and slices on rays shared by neighbouring pieces are
 * recorded separately so they can be compared against A.
 */
inline HardyProfile decomposed_hardy_bound(const GridField& h, double p, const KernelEvaluator& E,
                                           const std::vector<double>& radii, int directions_per_piece,
                                           double theta, std::uint64_t seed) {
    const Cone& C = E.cone();
    const auto pieces = decompose_nrants(C);
    if (pieces.empty()) fail(ErrorKind::EmptySample, "cone has no n-rant pieces");
    HardyProfile prof;
    prof.p = p;
    std::vector<RVec> all;
    for (std::size_t j = 0; j < pieces.size(); ++j) {
        const auto sub = CompactSubcone::angular_shrink(pieces[j], theta);
        double aj = 0.0;
        for (const auto& u : sub.sample_directions(directions_per_piece, seed + j))
            for (double r : radii) {
                const RVec y = u * r;
                const double v = lp_norm(poisson_slice(h, y, E), p);
                prof.slices.push_back({y, v});
                aj = std::max(aj, v);
                all.push_back(y);
            }
        prof.subcone_sups.push_back(aj);
        prof.sup = std::max(prof.sup, aj);
    }
    // rays shared by two pieces lie inside C but on the boundary of both pieces
    std::vector<RVec> shared;
    for (std::size_t i = 0; i < pieces.size(); ++i)
        for (std::size_t j = i + 1; j < pieces.size(); ++j)
            for (const auto& a : pieces[i].extreme_rays())
                for (const auto& b : pieces[j].extreme_rays())
                    if ((a - b).norm() < 1e-12 && C.contains(a)) shared.push_back(a);
    prof.direct_sup = prof.sup;
    for (const auto& u : shared)
        for (double r : radii) {
            const double v = lp_norm(poisson_slice(h, u * r, E), p);
            prof.boundary_slices.push_back({u * r, v});
            prof.direct_sup = std::max(prof.direct_sup, v);
        }
    return prof;
}

}  // namespace tubeh
