#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tubeh/errors.hpp"
#include "tubeh/math.hpp"

namespace tubeh {

enum class ConeShape { NRant, HalfLine, LightCone, Polyhedral, Sector };

inline constexpr double kDualTolerance = 1e-9;
inline constexpr int kIndicatrixSamples = 4096;

/**
 * @brief Regular open convex cone in R^n, n <= 3.
 *
 * Shapes with closed forms (n-rants, half-lines, the forward light cone) are
 * tagged; finite generator sets become Polyhedral and are validated exactly
 * through their facet normals. Sector is the intersection of a parent cone
 * with an n-rant and only supports membership-based queries.
 */
class Cone {
public:
    /// Open n-rant { y : (-1)^{v_j} y_j > 0 }.
    static Cone nrant(const std::vector<int>& v) {
        if (v.empty() || v.size() > kMaxDim) fail(ErrorKind::NonRegularCone, "n-rant dimension must be 1..3");
        Cone c(ConeShape::NRant, static_cast<int>(v.size()));
        for (int j = 0; j < c.n_; ++j) {
            if (v[j] != 0 && v[j] != 1) fail(ErrorKind::NonRegularCone, "n-rant pattern entries must be 0 or 1");
            c.signs_.push_back(v[j] == 0 ? 1 : -1);
        }
        c.init_orthant_rays();
        return c;
    }

    static Cone half_line(int sign) {
        if (sign != 1 && sign != -1) fail(ErrorKind::NonRegularCone, "half-line sign must be +1 or -1");
        Cone c(ConeShape::HalfLine, 1);
        c.signs_ = {sign};
        c.init_orthant_rays();
        return c;
    }

    /// Forward light cone { y : y_1 > |(y_2, ..., y_n)| }.
    static Cone light_cone(int dim) {
        if (dim < 2 || dim > kMaxDim) fail(ErrorKind::NonRegularCone, "light cone dimension must be 2 or 3");
        Cone c(ConeShape::LightCone, dim);
        if (dim == 2) {
            const double s = 1.0 / std::sqrt(2.0);
            c.extreme_ = {RVec{s, -s}, RVec{s, s}};
            c.dual_ = c.extreme_;
            c.facet_rays_ = {{0, 0}, {1, 1}};
        }
        return c;
    }

    /// Open interior of the conic hull of `generators`; rejects cones that are
    /// not pointed or not full-dimensional.
    static Cone polyhedral(const std::vector<RVec>& generators) {
        if (generators.empty()) fail(ErrorKind::NonRegularCone, "polyhedral cone needs generators");
        const int n = generators.front().size();
        if (n < 1 || n > kMaxDim) fail(ErrorKind::NonRegularCone, "polyhedral dimension must be 1..3");
        Cone c(ConeShape::Polyhedral, n);
        std::vector<RVec> gens;
        for (const auto& g : generators) {
            if (g.size() != n) fail(ErrorKind::NonRegularCone, "generators have mixed dimensions");
            if (!(g.norm() > 0) || !std::isfinite(g.norm())) fail(ErrorKind::NonRegularCone, "zero or non-finite generator");
            const RVec u = g.normalized();
            if (std::none_of(gens.begin(), gens.end(), [&](const RVec& h) { return (h - u).norm() < 1e-12; }))
                gens.push_back(u);
        }
        c.build_facets(gens);
        return c;
    }

    /// Intersection of `parent` with the n-rant of pattern v.
    static Cone sector(const Cone& parent, const std::vector<int>& v) {
        if (static_cast<int>(v.size()) != parent.dim()) fail(ErrorKind::NonRegularCone, "pattern dimension mismatch");
        Cone c(ConeShape::Sector, parent.dim());
        for (int b : v) c.signs_.push_back(b == 0 ? 1 : -1);
        c.parent_ = std::make_shared<const Cone>(parent);
        return c;
    }

    int dim() const { return n_; }
    ConeShape shape() const { return shape_; }
    /// Sign pattern s_j = (-1)^{v_j} for n-rants, half-lines and sectors.
    const std::vector<int>& signs() const { return signs_; }
    const Cone* parent() const { return parent_.get(); }
    bool finitely_generated() const { return !extreme_.empty(); }
    /// Unit extreme rays of the closure; empty for round cones and sectors.
    const std::vector<RVec>& extreme_rays() const { return extreme_; }
    /// Unit generators of the dual cone; these are the inward facet normals.
    const std::vector<RVec>& dual_rays() const { return dual_; }

    /**
     * @brief min over unit t in the dual cone of <u, t>, for a unit vector u.
     *
     * Positive exactly on pr(C); it doubles as the distance-like margin used
     * for tube points and as the per-direction separation constant.
     */
    double interior_margin(const RVec& u) const {
        switch (shape_) {
            case ConeShape::NRant:
            case ConeShape::HalfLine: return orthant_margin(u);
            case ConeShape::LightCone: {
                double r2 = 0.0;
                for (int j = 1; j < n_; ++j) r2 += u[j] * u[j];
                return (u[0] - std::sqrt(r2)) / std::sqrt(2.0);
            }
            case ConeShape::Polyhedral: {
                double m = std::numeric_limits<double>::infinity();
                for (const auto& a : dual_) m = std::min(m, a.dot(u));
                return m;
            }
            case ConeShape::Sector: return std::min(parent_->interior_margin(u), orthant_margin(u));
        }
        return 0.0;
    }

    bool contains(const RVec& y) const {
        const double r = y.norm();
        if (!(r > 0) || !std::isfinite(r)) return false;
        return interior_margin(y * (1.0 / r)) > 0.0;
    }

    bool closure_contains(const RVec& y, double tol = 1e-12) const {
        const double r = y.norm();
        if (r == 0.0) return true;
        return interior_margin(y * (1.0 / r)) >= -tol;
    }

    /// Pairs of indices into extreme_rays() bounding each facet (n = 2, 3).
    const std::vector<std::pair<int, int>>& facet_rays() const { return facet_rays_; }

    std::string describe() const {
        std::ostringstream os;
        switch (shape_) {
            case ConeShape::NRant:
                os << "nrant(";
                for (int j = 0; j < n_; ++j) os << (j ? "," : "") << (signs_[j] > 0 ? '+' : '-');
                os << ")";
                break;
            case ConeShape::HalfLine: os << "halfline(" << (signs_[0] > 0 ? '+' : '-') << ")"; break;
            case ConeShape::LightCone: os << "lightcone(" << n_ << ")"; break;
            case ConeShape::Polyhedral: os << "polyhedral(" << extreme_.size() << " rays)"; break;
            case ConeShape::Sector:
                os << parent_->describe() << "&nrant(";
                for (int j = 0; j < n_; ++j) os << (j ? "," : "") << (signs_[j] > 0 ? '+' : '-');
                os << ")";
                break;
        }
        return os.str();
    }

private:
    Cone(ConeShape s, int n) : shape_(s), n_(n) {}

    double orthant_margin(const RVec& u) const {
        double m = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n_; ++j) m = std::min(m, signs_[j] * u[j]);
        return m;
    }

    void init_orthant_rays() {
        for (int j = 0; j < n_; ++j) extreme_.push_back(RVec::unit(n_, j) * static_cast<double>(signs_[j]));
        dual_ = extreme_;
        if (n_ == 2) {
            // facet j is orthogonal to axis j and contains the other axis ray
            facet_rays_ = {{1, 1}, {0, 0}};
        } else if (n_ == 3) {
            facet_rays_ = {{1, 2}, {0, 2}, {0, 1}};
        }
    }

    void build_facets(const std::vector<RVec>& gens) {
        constexpr double tol = 1e-12;
        std::vector<RVec> candidates;
        if (n_ == 1) {
            candidates = {RVec{1.0}, RVec{-1.0}};
        } else if (n_ == 2) {
            for (const auto& g : gens) {
                candidates.push_back(RVec{-g[1], g[0]});
                candidates.push_back(RVec{g[1], -g[0]});
            }
        } else {
            for (std::size_t i = 0; i < gens.size(); ++i)
                for (std::size_t j = i + 1; j < gens.size(); ++j) {
                    const RVec c = cross(gens[i], gens[j]);
                    if (c.norm() < 1e-10) continue;
                    candidates.push_back(c.normalized());
                    candidates.push_back(-c.normalized());
                }
        }
        for (const auto& nrm : candidates) {
            bool valid = true, strict = false;
            for (const auto& g : gens) {
                const double d = nrm.dot(g);
                if (d < -tol) valid = false;
                if (d > tol) strict = true;
            }
            if (!valid || !strict) continue;
            if (std::none_of(dual_.begin(), dual_.end(), [&](const RVec& h) { return (h - nrm).norm() < 1e-9; }))
                dual_.push_back(nrm);
        }
        if (dual_.empty()) fail(ErrorKind::NonRegularCone, "generators do not span a full-dimensional cone");
        RVec w(n_);
        for (const auto& a : dual_) w += a;
        for (const auto& g : gens)
            if (!(w.dot(g) > 1e-10)) fail(ErrorKind::NonRegularCone, "generated cone contains a line");
        RVec centroid(n_);
        for (const auto& g : gens) centroid += g;
        for (const auto& a : dual_)
            if (!(a.dot(centroid) > tol)) fail(ErrorKind::NonRegularCone, "generated cone has empty interior");

        // Extreme rays: on each facet keep the widest pair of generators.
        auto ray_index = [&](const RVec& g) {
            for (std::size_t k = 0; k < extreme_.size(); ++k)
                if ((extreme_[k] - g).norm() < 1e-12) return static_cast<int>(k);
            extreme_.push_back(g);
            return static_cast<int>(extreme_.size() - 1);
        };
        if (n_ == 1) {
            extreme_ = {RVec{gens.front()[0] > 0 ? 1.0 : -1.0}};
            return;
        }
        for (const auto& nrm : dual_) {
            std::vector<RVec> on;
            for (const auto& g : gens)
                if (std::abs(nrm.dot(g)) <= 1e-10) on.push_back(g);
            if (n_ == 2) {
                const int k = ray_index(on.front());
                facet_rays_.emplace_back(k, k);
                continue;
            }
            std::size_t bi = 0, bj = 0;
            double best = 2.0;
            for (std::size_t i = 0; i < on.size(); ++i)
                for (std::size_t j = i; j < on.size(); ++j)
                    if (on[i].dot(on[j]) < best) {
                        best = on[i].dot(on[j]);
                        bi = i;
                        bj = j;
                    }
            facet_rays_.emplace_back(ray_index(on[bi]), ray_index(on[bj]));
        }
    }

    ConeShape shape_;
    int n_;
    std::vector<int> signs_;
    std::vector<RVec> extreme_;
    std::vector<RVec> dual_;
    std::vector<std::pair<int, int>> facet_rays_;
    std::shared_ptr<const Cone> parent_;
};

// ---- indicatrix and dual cone ---------------------------------------------

/// sup over y in pr(C) of -<t, y>, by maximization over the deterministic direction lattice.
inline double indicatrix_sampled(const Cone& C, const RVec& t, int count = kIndicatrixSamples) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& y : direction_lattice(C.dim(), count))
        if (C.contains(y)) best = std::max(best, -t.dot(y));
    if (!std::isfinite(best)) fail(ErrorKind::EmptySample, "no lattice direction falls inside " + C.describe());
    return best;
}

namespace detail {

// max of <w, y> over unit y in the closed planar wedge cone(a, b)
inline double arc_max(const RVec& w, const RVec& a, const RVec& b) {
    const double ab = a.dot(b), wa = w.dot(a), wb = w.dot(b);
    double best = std::max(wa, wb);
    const double den = 1.0 - ab * ab;
    if (den > 1e-14) {
        const double alpha = (wa - ab * wb) / den, beta = (wb - ab * wa) / den;
        if (alpha >= 0 && beta >= 0) {
            const RVec p = a * alpha + b * beta;
            best = std::max(best, p.norm());
        }
    }
    return best;
}

}  // namespace detail

/**
 * @brief Indicatrix u_C(t) = sup over y in pr(C) of -<t, y>.
 *
 * Closed forms for n-rants, half-lines, light cones and polyhedral cones;
 * sectors fall back to the direction lattice.
 */
inline double indicatrix(const Cone& C, const RVec& t) {
    const int n = C.dim();
    if (t.size() != n) fail(ErrorKind::NonRegularCone, "indicatrix argument has wrong dimension");
    const RVec w = -t;
    switch (C.shape()) {
        case ConeShape::NRant:
        case ConeShape::HalfLine: {
            double pos2 = 0.0, mx = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < n; ++j) {
                const double a = C.signs()[j] * w[j];
                if (a > 0) pos2 += a * a;
                mx = std::max(mx, a);
            }
            return pos2 > 0 ? std::sqrt(pos2) : mx;
        }
        case ConeShape::LightCone: {
            double r2 = 0.0;
            for (int j = 1; j < n; ++j) r2 += w[j] * w[j];
            const double r = std::sqrt(r2);
            if (w[0] >= r) return w.norm();
            return (w[0] + r) / std::sqrt(2.0);
        }
        case ConeShape::Polyhedral: {
            const double wn = w.norm();
            if (wn == 0.0) return 0.0;
            if (C.closure_contains(w, 0.0)) return wn;
            const auto& R = C.extreme_rays();
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& r : R) best = std::max(best, w.dot(r));
            if (n == 3)
                for (const auto& [i, j] : C.facet_rays()) best = std::max(best, detail::arc_max(w, R[i], R[j]));
            return best;
        }
        case ConeShape::Sector: return indicatrix_sampled(C, t);
    }
    return 0.0;
}

/// t in the closed dual cone, within tolerance tau on the unit vector t/|t|.
inline bool dual_contains(const Cone& C, const RVec& t, double tau = kDualTolerance) {
    const double r = t.norm();
    if (r == 0.0) return true;
    const RVec u = t * (1.0 / r);
    switch (C.shape()) {
        case ConeShape::NRant:
        case ConeShape::HalfLine:
            for (int j = 0; j < C.dim(); ++j)
                if (C.signs()[j] * u[j] < -tau) return false;
            return true;
        case ConeShape::LightCone: {
            double r2 = 0.0;
            for (int j = 1; j < C.dim(); ++j) r2 += u[j] * u[j];
            return u[0] - std::sqrt(r2) >= -tau;
        }
        case ConeShape::Polyhedral:
            for (const auto& g : C.extreme_rays())
                if (g.dot(u) < -tau) return false;
            return true;
        case ConeShape::Sector: return indicatrix_sampled(C, u) <= tau;
    }
    return false;
}

// ---- sampling ---------------------------------------------------------------

/// Deterministic unit vectors inside C for a given seed.
inline std::vector<RVec> sample_projection(const Cone& C, int count, std::uint64_t seed) {
    if (count < 1) fail(ErrorKind::EmptySample, "count must be >= 1");
    const int n = C.dim();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    std::vector<RVec> out;
    out.reserve(count);
    const long long max_draws = 10000LL * count;
    long long draws = 0;
    while (static_cast<int>(out.size()) < count) {
        if (++draws > max_draws) fail(ErrorKind::EmptySample, "rejection sampling exhausted for " + C.describe());
        RVec y(n);
        if (C.shape() == ConeShape::NRant || C.shape() == ConeShape::HalfLine) {
            for (int j = 0; j < n; ++j) y[j] = C.signs()[j] * std::abs(normal(rng));
        } else if (C.shape() == ConeShape::Polyhedral && n > 1) {
            for (const auto& r : C.extreme_rays()) y += r * expo(rng);
        } else {
            for (int j = 0; j < n; ++j) y[j] = normal(rng);
        }
        if (!C.contains(y)) continue;
        out.push_back(y.normalized());
    }
    return out;
}

// ---- compact subcones ---------------------------------------------------------

/**
 * @brief Compact subcone C' of a parent cone with exclusion radius r.
 *
 * Either the conic hull of explicit generators strictly inside the parent, or
 * an angular shrink { y : margin(y/|y|) >= theta * max margin }.
 */
class CompactSubcone {
public:
    static CompactSubcone from_generators(const Cone& parent, const std::vector<RVec>& gens, double r = 0.0) {
        if (gens.empty()) fail(ErrorKind::DegenerateSubcone, "subcone needs at least one generator");
        CompactSubcone s(parent, r);
        for (const auto& g : gens) {
            if (g.size() != parent.dim()) fail(ErrorKind::DegenerateSubcone, "generator dimension mismatch");
            const RVec u = g.normalized();
            if (!(parent.interior_margin(u) > 0))
                fail(ErrorKind::DegenerateSubcone, "generator not strictly inside " + parent.describe());
            s.gens_.push_back(u);
        }
        return s;
    }

    static CompactSubcone angular_shrink(const Cone& parent, double theta, double r = 0.0) {
        if (!(theta > 0 && theta < 1)) fail(ErrorKind::DegenerateSubcone, "shrink parameter must lie in (0,1)");
        CompactSubcone s(parent, r);
        s.theta_ = theta;
        s.threshold_ = theta * max_margin(parent);
        return s;
    }

    const Cone& parent() const { return parent_; }
    double radius() const { return r_; }
    bool by_generators() const { return !gens_.empty(); }
    const std::vector<RVec>& generators() const { return gens_; }
    double theta() const { return theta_; }

    /// Direction test for closure(C'), ignoring the exclusion radius.
    bool contains_direction(const RVec& y) const {
        const double r = y.norm();
        if (!(r > 0)) return false;
        const RVec u = y * (1.0 / r);
        if (!by_generators()) return parent_.contains(u) && parent_.interior_margin(u) >= threshold_ - 1e-15;
        if (gens_.size() == 1) return (u - gens_.front()).norm() < 1e-9;
        if (static_cast<int>(gens_.size()) >= parent_.dim()) {
            try {
                return Cone::polyhedral(gens_).closure_contains(u, 1e-12);
            } catch (const Error&) {
            }
        }
        if (gens_.size() == 2) {
            const RVec& a = gens_[0];
            const RVec& b = gens_[1];
            const double ab = a.dot(b), den = 1.0 - ab * ab;
            if (den < 1e-14) return false;
            const double alpha = (u.dot(a) - ab * u.dot(b)) / den, beta = (u.dot(b) - ab * u.dot(a)) / den;
            return alpha >= -1e-12 && beta >= -1e-12 && (a * alpha + b * beta - u).norm() < 1e-9;
        }
        fail(ErrorKind::DegenerateSubcone, "unsupported degenerate generator configuration");
    }

    /// Membership in the truncated set C' minus the closed r-ball.
    bool contains(const RVec& y) const { return y.norm() > r_ && contains_direction(y); }

    /// Deterministic unit directions inside C'.
    std::vector<RVec> sample_directions(int count, std::uint64_t seed) const {
        std::vector<RVec> out;
        std::mt19937_64 rng(seed);
        std::exponential_distribution<double> expo(1.0);
        if (by_generators()) {
            for (int k = 0; k < count; ++k) {
                RVec y(parent_.dim());
                for (const auto& g : gens_) y += g * expo(rng);
                out.push_back(y.normalized());
            }
            return out;
        }
        int round = 0;
        while (static_cast<int>(out.size()) < count) {
            if (++round > 1000) fail(ErrorKind::EmptySample, "subcone sampling exhausted");
            for (const auto& u : sample_projection(parent_, count, seed + round))
                if (static_cast<int>(out.size()) < count && contains_direction(u)) out.push_back(u);
        }
        return out;
    }

    /// Separation constant: <y, t> >= delta |y||t| on C' x C*.
    double delta() const {
        double d = std::numeric_limits<double>::infinity();
        if (by_generators()) {
            for (const auto& g : gens_) d = std::min(d, parent_.interior_margin(g));
        } else {
            d = threshold_;
        }
        if (!(d > 0)) fail(ErrorKind::DegenerateSubcone, "subcone touches the boundary of " + parent_.describe());
        return d;
    }

private:
    CompactSubcone(const Cone& parent, double r) : parent_(parent), r_(r) {
        if (!(r >= 0)) fail(ErrorKind::DegenerateSubcone, "exclusion radius must be >= 0");
    }

    static double max_margin(const Cone& C) {
        switch (C.shape()) {
            case ConeShape::NRant:
            case ConeShape::HalfLine: return 1.0 / std::sqrt(static_cast<double>(C.dim()));
            case ConeShape::LightCone: return 1.0 / std::sqrt(2.0);
            default: {
                double best = 0.0;
                for (const auto& u : direction_lattice(C.dim(), kIndicatrixSamples))
                    best = std::max(best, C.interior_margin(u));
                if (C.finitely_generated()) {
                    RVec c(C.dim());
                    for (const auto& r : C.extreme_rays()) c += r;
                    best = std::max(best, C.interior_margin(c.normalized()));
                }
                return best;
            }
        }
    }

    Cone parent_;
    double r_;
    std::vector<RVec> gens_;
    double theta_ = 0.0;
    double threshold_ = 0.0;
};

inline double delta_constant(const CompactSubcone& Cp) { return Cp.delta(); }

// ---- n-rant decomposition -----------------------------------------------------

namespace detail {

inline double angle_of(const RVec& u) {
    double a = std::atan2(u[1], u[0]);
    return a < 0 ? a + kTwoPi : a;
}

// Planar wedge as (start angle, ccw width) from its two extreme rays.
inline std::pair<double, double> wedge_of(const RVec& a, const RVec& b) {
    const RVec& lo = det2(a, b) > 0 ? a : b;
    const RVec& hi = det2(a, b) > 0 ? b : a;
    const double s = angle_of(lo);
    double w = angle_of(hi) - s;
    if (w < 0) w += kTwoPi;
    return {s, w};
}

}  // namespace detail

/// Non-empty intersections C & C_v over all sign patterns v (bit j of the index is v_j).
inline std::vector<Cone> decompose_nrants(const Cone& C) {
    const int n = C.dim();
    std::vector<Cone> out;
    if (C.shape() == ConeShape::NRant || C.shape() == ConeShape::HalfLine) {
        out.push_back(C);
        return out;
    }
    const auto lattice = direction_lattice(n, kIndicatrixSamples);
    for (int mask = 0; mask < (1 << n); ++mask) {
        std::vector<int> v(n);
        for (int j = 0; j < n; ++j) v[j] = (mask >> j) & 1;
        const Cone orth = Cone::nrant(v);
        if (n == 2 && C.finitely_generated()) {
            const auto [cs, cw] = detail::wedge_of(C.extreme_rays()[0], C.extreme_rays()[1]);
            const auto [os, ow] = detail::wedge_of(orth.extreme_rays()[0], orth.extreme_rays()[1]);
            double rel = os - cs;
            if (rel < 0) rel += kTwoPi;
            for (double shift : {rel, rel - kTwoPi}) {
                const double lo = std::max(0.0, shift), hi = std::min(cw, shift + ow);
                if (hi - lo <= 1e-12) continue;
                if (lo <= 1e-15 && hi >= cw - 1e-15) {
                    out.push_back(C);
                } else {
                    const double a0 = cs + lo, a1 = cs + hi;
                    out.push_back(
                        Cone::polyhedral({RVec{std::cos(a0), std::sin(a0)}, RVec{std::cos(a1), std::sin(a1)}}));
                }
            }
            continue;
        }
        if (std::any_of(lattice.begin(), lattice.end(),
                        [&](const RVec& u) { return C.contains(u) && orth.contains(u); }))
            out.push_back(Cone::sector(C, v));
    }
    return out;
}

}  // namespace tubeh
