#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "tubeh/cone_geometry.hpp"
#include "tubeh/errors.hpp"
#include "tubeh/grid_field.hpp"
#include "tubeh/math.hpp"

namespace tubeh {

inline constexpr double kTubeMargin = 1e-6;

/** @brief z = x + iy with y strictly inside a cone. */
class TubePoint {
public:
    static TubePoint make(const Cone& C, const RVec& x, const RVec& y, double margin = kTubeMargin) {
        if (x.size() != C.dim() || y.size() != C.dim()) fail(ErrorKind::PointOutsideTube, "dimension mismatch");
        const double r = y.norm();
        if (!(r > 0) || !std::isfinite(r)) fail(ErrorKind::PointOutsideTube, "imaginary part must be nonzero");
        if (!(C.interior_margin(y * (1.0 / r)) >= margin))
            fail(ErrorKind::PointOutsideTube, "imaginary part too close to the boundary of " + C.describe());
        return TubePoint(x, y);
    }

    const RVec& x() const { return x_; }
    const RVec& y() const { return y_; }

private:
    TubePoint(const RVec& x, const RVec& y) : x_(x), y_(y) {}
    RVec x_, y_;
};

enum class KernelMethod { ClosedForm, Quadrature };

struct QuadratureSpec {
    int angular_panels = 4;
    int radial_min_panels = 4;
    double tail_eps = 1e-15;
    double reach = 1.25;
    double rel_tol = 1e-10;
    int max_levels = 5;
};

namespace detail {

inline cplx cdot(const RVec& u, const RVec& y, const RVec& a) { return cplx(u.dot(a), y.dot(a)); }

template <int Points, class F>
auto gl_composite(F&& f, double a, double b, int panels) {
    using R = decltype(f(a));
    R sum{};
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k)
        sum += boost::math::quadrature::gauss<double, Points>::integrate(f, a + k * h, a + (k + 1) * h);
    return sum;
}

/// Simplicial piece of the dual cone: n unit generators and |det|.
struct Simplex {
    std::vector<RVec> a;
    double det = 1.0;
};

}  // namespace detail

/**
 * @brief Immutable evaluator of K(z - t), K(2iy) and Q(z; t) for one cone.
 *
 * Closed forms: the dual cone is split into simplicial pieces {sum l_j a_j},
 * each contributing |det A| prod_j i / (2 pi <w, a_j>); the round light cone
 * in R^3 uses 2 pi (-4 pi^2 (w_1^2 - w_2^2 - w_3^2))^{-3/2}. The quadrature
 * path integrates the defining integral directly in conic coordinates.
 */
class KernelEvaluator {
public:
    explicit KernelEvaluator(const Cone& C, KernelMethod method = KernelMethod::ClosedForm, QuadratureSpec q = {})
        : cone_(C), method_(method), quad_(q) {
        const int n = C.dim();
        if (C.shape() == ConeShape::Sector)
            fail(ErrorKind::NonRegularCone, "kernels need a cone with a known dual: " + C.describe());
        if (C.shape() == ConeShape::LightCone && n == 3) {
            round_ = true;
            return;
        }
        const auto& D = C.dual_rays();
        if (n == 1) {
            pieces_.push_back({{D.front()}, 1.0});
        } else if (n == 2) {
            pieces_.push_back({{D[0], D[1]}, std::abs(det2(D[0], D[1]))});
        } else {
            // fan triangulation of the dual cone around its centroid
            RVec c(3);
            for (const auto& a : D) c += a;
            c = c.normalized();
            RVec e1 = std::abs(c[0]) < 0.9 ? cross(c, RVec{1, 0, 0}) : cross(c, RVec{0, 1, 0});
            e1 = e1.normalized();
            const RVec e2 = cross(c, e1);
            std::vector<RVec> ring = D;
            std::sort(ring.begin(), ring.end(), [&](const RVec& p, const RVec& q2) {
                return std::atan2(p.dot(e2), p.dot(e1)) < std::atan2(q2.dot(e2), q2.dot(e1));
            });
            for (std::size_t k = 1; k + 1 < ring.size(); ++k)
                pieces_.push_back({{ring[0], ring[k], ring[k + 1]}, std::abs(det3(ring[0], ring[k], ring[k + 1]))});
        }
    }

    const Cone& cone() const { return cone_; }
    KernelMethod method() const { return method_; }
    int dim() const { return cone_.dim(); }
    /// True when Q(u; y) factors as a product of 1-D Poisson kernels in rotated coordinates.
    bool is_simplicial() const { return !round_ && pieces_.size() == 1; }
    const std::vector<detail::Simplex>& pieces() const { return pieces_; }

    /// K(w) with w = u + iy.
    cplx cauchy_offset(const RVec& u, const RVec& y) const {
        return method_ == KernelMethod::ClosedForm ? closed_form(u, y) : quadrature(u, y);
    }
    cplx cauchy(const TubePoint& z, const RVec& t) const { return cauchy_offset(z.x() - t, z.y()); }

    /// K(2iy), real and positive for y in the cone.
    double k2iy(const RVec& y) const { return cauchy_offset(RVec(dim()), y * 2.0).real(); }

    double poisson_offset(const RVec& u, const RVec& y) const {
        return std::norm(cauchy_offset(u, y)) / k2iy(y);
    }
    double poisson_offset(const RVec& u, const RVec& y, double k2) const {
        return std::norm(cauchy_offset(u, y)) / k2;
    }
    double poisson(const TubePoint& z, const RVec& t) const { return poisson_offset(z.x() - t, z.y()); }

    cplx closed_form(const RVec& u, const RVec& y) const {
        if (round_) {
            // M(w) = w1^2 - w2^2 - w3^2 with w = u + iy
            const cplx w1(u[0], y[0]), w2(u[1], y[1]), w3(u[2], y[2]);
            const cplx m = -4.0 * kPi * kPi * (w1 * w1 - w2 * w2 - w3 * w3);
            return kTwoPi * std::pow(m, -1.5);
        }
        cplx total = 0.0;
        for (const auto& s : pieces_) {
            cplx prod = s.det;
            for (const auto& a : s.a) prod *= cplx(0.0, 1.0) / (kTwoPi * detail::cdot(u, y, a));
            total += prod;
        }
        return total;
    }

    /// Direct numerical evaluation of the defining integral, refined until two levels agree.
    cplx quadrature(const RVec& u, const RVec& y) const {
        cplx prev = quadrature_level(u, y, 0);
        for (int level = 1; level <= quad_.max_levels; ++level) {
            const cplx cur = quadrature_level(u, y, level);
            if (std::abs(cur - prev) <= quad_.rel_tol * std::abs(cur) + 1e-300) return cur;
            prev = cur;
        }
        fail(ErrorKind::QuadratureNotConverged, "kernel quadrature did not settle within the refinement budget");
    }

private:
    // int_0^R r^{n-1} exp(2 pi i r c) dr, with R set by the damping rate Im c
    cplx radial(cplx c, int level) const {
        const int n = dim();
        // in 3D the nested angular rule dominates; the radial integral is exact there
        const double kappa = kTwoPi * c.imag();
        if (!(kappa > 0)) fail(ErrorKind::PointOutsideTube, "nonpositive damping in kernel quadrature");
        if (n == 3) return 2.0 / std::pow(cplx(0.0, -kTwoPi) * c, 3);
        const double R = quad_.reach * (std::log(1.0 / quad_.tail_eps) + 4.0 * (n - 1)) / kappa;
        const double osc = kTwoPi * std::abs(c.real()) * R, decay = kappa * R;
        const int panels = (quad_.radial_min_panels + static_cast<int>(std::ceil(osc / 2.0 + decay / 2.0))) << level;
        if (panels > 50'000'000) fail(ErrorKind::QuadratureNotConverged, "radial integrand oscillates too fast");
        auto f = [&](double r) { return std::pow(r, n - 1) * std::exp(cplx(0.0, kTwoPi * r) * c); };
        return detail::gl_composite<20>(f, 0.0, R, panels);
    }

    cplx quadrature_level(const RVec& u, const RVec& y, int level) const {
        const int n = dim();
        const int ap = quad_.angular_panels << level;
        if (round_) {
            auto inner = [&](double alpha) {
                return detail::gl_composite<10>(
                    [&](double phi) {
                        const RVec w{std::cos(alpha), std::sin(alpha) * std::cos(phi), std::sin(alpha) * std::sin(phi)};
                        return radial(detail::cdot(u, y, w), level) * std::sin(alpha);
                    },
                    0.0, kTwoPi, 4 * ap);
            };
            return detail::gl_composite<10>(inner, 0.0, kPi / 4.0, ap);
        }
        cplx total = 0.0;
        for (const auto& s : pieces_) {
            if (n == 1) {
                total += s.det * radial(detail::cdot(u, y, s.a[0]), level);
            } else if (n == 2) {
                total += s.det * detail::gl_composite<10>(
                                     [&](double l) {
                                         const RVec w = s.a[0] * (1.0 - l) + s.a[1] * l;
                                         return radial(detail::cdot(u, y, w), level);
                                     },
                                     0.0, 1.0, ap);
            } else {
                // collapsed square (alpha, v) -> barycentric (1-alpha-beta, alpha, beta), beta = (1-alpha) v
                total += s.det * detail::gl_composite<10>(
                                     [&](double alpha) {
                                         return (1.0 - alpha) * detail::gl_composite<10>(
                                                                    [&](double v) {
                                                                        const double beta = (1.0 - alpha) * v;
                                                                        const RVec w = s.a[0] * (1.0 - alpha - beta) +
                                                                                       s.a[1] * alpha + s.a[2] * beta;
                                                                        return radial(detail::cdot(u, y, w), level);
                                                                    },
                                                                    0.0, 1.0, ap);
                                     },
                                     0.0, 1.0, ap);
            }
        }
        return total;
    }

    Cone cone_;
    KernelMethod method_;
    QuadratureSpec quad_;
    bool round_ = false;
    std::vector<detail::Simplex> pieces_;
};

/// Largest relative closed-form vs quadrature disagreement over the given (u, y) probes.
inline double cross_validate(const KernelEvaluator& E, const std::vector<std::pair<RVec, RVec>>& probes) {
    double worst = 0.0;
    for (const auto& [u, y] : probes) {
        const cplx a = E.closed_form(u, y), b = E.quadrature(u, y);
        worst = std::max(worst, std::abs(a - b) / std::abs(a));
    }
    return worst;
}

/**
 * @brief Estimated Poisson mass outside the grid for a tube point.
 *
 * Simplicial cones: Q dt factors into 1-D Poisson kernels of widths <y, a_j>
 * in u = A (x - t); a u-box that fits inside the grid box bounds the tail by
 * 1 - prod_j (2/pi) arctan(s / <y, a_j>). Other cones: the Riemann mass in the
 * shell between the half-size box and the grid, which tracks the outside mass
 * for kernels with power-law tails.
 */
inline double poisson_tail_estimate(const KernelEvaluator& E, const TubePoint& z, const GridSpec& grid) {
    const int n = E.dim();
    std::array<double, kMaxDim> R{};
    for (int i = 0; i < n; ++i)
        R[i] = std::min(z.x()[i] - grid.origin(), -grid.origin() - z.x()[i]) - grid.spacing();
    if (*std::min_element(R.begin(), R.begin() + n) <= 0) return 1.0;
    if (E.is_simplicial()) {
        const auto& a = E.pieces().front().a;
        // rows of A are the a_j; s = min_i R_i / sum_j |A^{-1}_{ij}|
        double s = std::numeric_limits<double>::infinity();
        if (n == 1) {
            s = R[0];
        } else if (n == 2) {
            const double det = det2(a[0], a[1]);
            const double inv[2][2] = {{a[1][1] / det, -a[0][1] / det}, {-a[1][0] / det, a[0][0] / det}};
            for (int i = 0; i < 2; ++i) s = std::min(s, R[i] / (std::abs(inv[i][0]) + std::abs(inv[i][1])));
        } else {
            const double det = det3(a[0], a[1], a[2]);
            const RVec c0 = cross(a[1], a[2]), c1 = cross(a[2], a[0]), c2 = cross(a[0], a[1]);
            for (int i = 0; i < 3; ++i)
                s = std::min(s, R[i] * std::abs(det) / (std::abs(c0[i]) + std::abs(c1[i]) + std::abs(c2[i])));
        }
        double inside = 1.0;
        for (const auto& aj : a) inside *= (2.0 / kPi) * std::atan(s / z.y().dot(aj));
        return 1.0 - inside;
    }
    const double k2 = E.k2iy(z.y());
    double full = 0.0, half = 0.0;
    for (std::size_t i = 0; i < grid.total(); ++i) {
        const RVec t = grid.point(i);
        const double q = E.poisson_offset(z.x() - t, z.y(), k2);
        full += q;
        bool in_half = true;
        for (int a = 0; a < n; ++a)
            if (std::abs(t[a] - z.x()[a]) > 0.5 * R[a]) in_half = false;
        if (in_half) half += q;
    }
    return (full - half) * grid.cell_volume();
}

/// Riemann sum of Q(z; .) over the grid; throws TailTooFat when the estimated
/// mass outside the grid exceeds `tolerance`.
inline double poisson_mass(const KernelEvaluator& E, const TubePoint& z, const GridSpec& grid, double tolerance) {
    const double tail = poisson_tail_estimate(E, z, grid);
    if (tail > tolerance)
        fail(ErrorKind::TailTooFat, "estimated kernel mass outside the grid " + std::to_string(tail) +
                                        " exceeds tolerance " + std::to_string(tolerance));
    const double k2 = E.k2iy(z.y());
    std::vector<double> partial(grid.points, 0.0);
    const std::size_t per = grid.total() / grid.points;
    parallel_for(grid.points, [&](std::size_t row) {
        double s = 0.0;
        for (std::size_t j = 0; j < per; ++j) s += E.poisson_offset(z.x() - grid.point(row * per + j), z.y(), k2);
        partial[row] = s;
    });
    double s = 0.0;
    for (double v : partial) s += v;
    return s * grid.cell_volume();
}

/**
 * @brief Positive lower bound B(C) with K(2iy) >= B(C) |y|^{-n} on C.
 *
 * Exact infima for n-rants, half-lines and light cones; otherwise 0.99 times
 * the minimum of |y|^n K(2iy) over the direction lattice inside C.
 */
inline double b_constant(const KernelEvaluator& E) {
    const Cone& C = E.cone();
    const int n = C.dim();
    switch (C.shape()) {
        case ConeShape::NRant:
        case ConeShape::HalfLine: return std::pow(static_cast<double>(n), 0.5 * n) / std::pow(4.0 * kPi, n);
        case ConeShape::LightCone: return n == 2 ? 1.0 / (8.0 * kPi * kPi) : 1.0 / (32.0 * kPi * kPi);
        default: {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& u : direction_lattice(n, kIndicatrixSamples))
                if (C.contains(u)) best = std::min(best, E.k2iy(u));
            if (!std::isfinite(best)) fail(ErrorKind::EmptySample, "no lattice direction inside " + C.describe());
            return 0.99 * best;
        }
    }
}

/// Pointwise bound |K(x + iy)| <= Z_n (n-1)! delta^{-n} |y|^{-n}.
inline double cauchy_sup_bound(int n, double delta, double ynorm) {
    return unit_sphere_area(n) * factorial(n - 1) * std::pow(delta, -n) * std::pow(ynorm, -n);
}

/// ||K(. + iy)||_q <= (Z_n (n-1)! / (2 pi p delta)^n)^{1/p} |y|^{-n/p}, 1/p + 1/q = 1, p in (1, 2].
inline double cauchy_lq_bound(int n, double p, double delta, double ynorm) {
    return std::pow(unit_sphere_area(n) * factorial(n - 1) / std::pow(kTwoPi * p * delta, n), 1.0 / p) *
           std::pow(ynorm, -n / p);
}

/// ||Q(z; .)||_q <= (Z_n (n-1)! delta^{-n})^{2/p} B^{-1/p} |y|^{-n/p}, from
/// ||Q||_q <= sup|K|^{2/p} K(2iy)^{-1/p} and ||K||_2^2 = K(2iy).
inline double poisson_lq_bound(int n, double p, double delta, double B, double ynorm) {
    const double c = unit_sphere_area(n) * factorial(n - 1) * std::pow(delta, -n);
    return std::pow(c, 2.0 / p) * std::pow(B, -1.0 / p) * std::pow(ynorm, -n / p);
}

/// Relative slack for bounds that hold with equality (n = 1 half-line K(2iy) |y|).
inline constexpr double kBoundRoundoff = 1e-12;

struct KernelBoundsReport {
    double q = 2.0;
    double delta = 0.0;
    double b_constant = 0.0;
    double lq_norm_cauchy = 0.0;
    double lq_bound_cauchy = 0.0;
    double k2iy = 0.0;
    double k2iy_lower_bound = 0.0;
    double sup_cauchy = 0.0;
    double sup_bound_cauchy = 0.0;
    double lq_norm_poisson = 0.0;
    double lq_bound_poisson = 0.0;

    bool all_hold() const {
        return lq_norm_cauchy <= lq_bound_cauchy && k2iy >= k2iy_lower_bound * (1.0 - kBoundRoundoff) && sup_cauchy <= sup_bound_cauchy &&
               lq_norm_poisson <= lq_bound_poisson;
    }
};

/// Measures the kernel norms of z over the grid and pairs each with its bound.
inline KernelBoundsReport kernel_bounds_report(const KernelEvaluator& E, const CompactSubcone& Cp, const TubePoint& z,
                                               double q, const GridSpec& grid) {
    if (!(q >= 2.0)) fail(ErrorKind::InvalidP, "kernel bounds need q >= 2 (p in (1,2])");
    if (!Cp.contains(z.y())) fail(ErrorKind::PointOutsideTube, "tube point outside the truncated subcone");
    const int n = E.dim();
    const double p = conjugate_exponent(q);
    KernelBoundsReport r;
    r.q = q;
    r.delta = Cp.delta();
    r.b_constant = b_constant(E);
    const double ynorm = z.y().norm();
    r.k2iy = E.k2iy(z.y());
    GridField K(grid, 1), Q(grid, 1);
    parallel_for(grid.total(), [&](std::size_t i) {
        const cplx k = E.cauchy(z, grid.point(i));
        K.at(i, 0) = k;
        Q.at(i, 0) = std::norm(k) / r.k2iy;
    });
    r.lq_norm_cauchy = lp_norm(K, q);
    r.lq_bound_cauchy = cauchy_lq_bound(n, p, r.delta, ynorm);
    r.k2iy_lower_bound = r.b_constant * std::pow(ynorm, -n);
    r.sup_cauchy = lp_norm(K, std::numeric_limits<double>::infinity());
    r.sup_bound_cauchy = cauchy_sup_bound(n, r.delta, ynorm);
    r.lq_norm_poisson = lp_norm(Q, q);
    r.lq_bound_poisson = poisson_lq_bound(n, p, r.delta, r.b_constant, ynorm);
    return r;
}

}  // namespace tubeh
