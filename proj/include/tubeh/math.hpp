#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "tubeh/errors.hpp"

namespace tubeh {

using cplx = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr int kMaxDim = 3;

/** @brief Small fixed-capacity real vector (n <= 3), value semantics, no heap. */
class RVec {
public:
    RVec() = default;
    explicit RVec(int n, double fill = 0.0) : n_(n) {
        assert(n >= 0 && n <= kMaxDim);
        v_.fill(0.0);
        for (int i = 0; i < n; ++i) v_[i] = fill;
    }
    RVec(std::initializer_list<double> xs) : n_(static_cast<int>(xs.size())) {
        assert(n_ <= kMaxDim);
        int i = 0;
        for (double x : xs) v_[i++] = x;
        for (; i < kMaxDim; ++i) v_[i] = 0.0;
    }
    static RVec from(const std::vector<double>& xs) {
        if (xs.empty() || xs.size() > kMaxDim) fail(ErrorKind::DescriptorInvalid, "vector dimension must be 1..3");
        RVec r(static_cast<int>(xs.size()));
        for (int i = 0; i < r.n_; ++i) r.v_[i] = xs[i];
        return r;
    }
    static RVec unit(int n, int axis) {
        RVec r(n);
        r[axis] = 1.0;
        return r;
    }

    int size() const { return n_; }
    double& operator[](int i) { return v_[i]; }
    double operator[](int i) const { return v_[i]; }
    const double* begin() const { return v_.data(); }
    const double* end() const { return v_.data() + n_; }

    double dot(const RVec& o) const {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += v_[i] * o.v_[i];
        return s;
    }
    double norm() const { return std::sqrt(dot(*this)); }
    RVec normalized() const {
        const double r = norm();
        RVec out = *this;
        if (r > 0) out *= 1.0 / r;
        return out;
    }
    std::vector<double> to_vector() const { return {begin(), end()}; }

    RVec& operator+=(const RVec& o) { for (int i = 0; i < n_; ++i) v_[i] += o.v_[i]; return *this; }
    RVec& operator-=(const RVec& o) { for (int i = 0; i < n_; ++i) v_[i] -= o.v_[i]; return *this; }
    RVec& operator*=(double s) { for (int i = 0; i < n_; ++i) v_[i] *= s; return *this; }
    friend RVec operator+(RVec a, const RVec& b) { return a += b; }
    friend RVec operator-(RVec a, const RVec& b) { return a -= b; }
    friend RVec operator-(RVec a) { return a *= -1.0; }
    friend RVec operator*(RVec a, double s) { return a *= s; }
    friend RVec operator*(double s, RVec a) { return a *= s; }
    friend bool operator==(const RVec& a, const RVec& b) {
        if (a.n_ != b.n_) return false;
        for (int i = 0; i < a.n_; ++i)
            if (a.v_[i] != b.v_[i]) return false;
        return true;
    }

private:
    std::array<double, kMaxDim> v_{};
    int n_ = 0;
};

inline RVec cross(const RVec& a, const RVec& b) {
    return RVec{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double det2(const RVec& a, const RVec& b) { return a[0] * b[1] - a[1] * b[0]; }
inline double det3(const RVec& a, const RVec& b, const RVec& c) { return a.dot(cross(b, c)); }

/// Surface area of the unit sphere in R^n: 2 pi^{n/2} / Gamma(n/2).
inline double unit_sphere_area(int n) { return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n); }

inline double factorial(int k) { return std::tgamma(k + 1.0); }

/// Conjugate exponent; q = inf for p = 1 and q = 1 for p = inf.
inline double conjugate_exponent(double p) {
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
}

inline std::string format_p(double p) {
    if (std::isinf(p)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", p);
    return buf;
}

// ---- parallelism ---------------------------------------------------------

inline std::atomic<int>& thread_setting() {
    static std::atomic<int> t{0};
    return t;
}

inline void set_thread_count(int t) { thread_setting() = std::max(0, t); }

inline int thread_count() {
    const int t = thread_setting();
    if (t > 0) return t;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, count) over disjoint contiguous blocks.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(thread_count(), std::max<std::size_t>(1, count / 256));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t block = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * block, hi = std::min(count, lo + block);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

// ---- deterministic direction sets ----------------------------------------

/// Low-discrepancy unit directions covering S^{n-1}: both signs for n=1,
/// equispaced angles for n=2, a Fibonacci lattice for n=3.
inline std::vector<RVec> direction_lattice(int n, int count) {
    std::vector<RVec> out;
    if (n == 1) {
        out.push_back(RVec{1.0});
        out.push_back(RVec{-1.0});
        return out;
    }
    out.reserve(count);
    if (n == 2) {
        for (int k = 0; k < count; ++k) {
            const double a = kTwoPi * (k + 0.5) / count;
            out.push_back(RVec{std::cos(a), std::sin(a)});
        }
        return out;
    }
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
        const double z = 1.0 - 2.0 * (k + 0.5) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double a = golden * k;
        out.push_back(RVec{z, r * std::cos(a), r * std::sin(a)});
    }
    return out;
}

}  // namespace tubeh
