#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "tubeh/math.hpp"

namespace tubeh::fft {

namespace detail {

struct PlanCache {
    std::mutex mutex;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans;

    ~PlanCache() {
        for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
    }
};

inline PlanCache& cache() {
    static PlanCache c;
    return c;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n) : size(n), data(fftw_alloc_complex(n)) {}
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    std::size_t size;
    fftw_complex* data;
};

// Plans are created in-place on an fftw-aligned buffer; execution reuses them
// through the new-array interface, which FFTW documents as thread safe.
inline fftw_plan plan_for(std::size_t n, int sign) {
    auto& c = cache();
    std::lock_guard lock(c.mutex);
    const auto key = std::make_pair(n, sign);
    if (auto it = c.plans.find(key); it != c.plans.end()) return it->second;
    FftwBuffer tmp(n);
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), tmp.data, tmp.data, sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD,
                                   FFTW_ESTIMATE);
    c.plans.emplace(key, p);
    return p;
}

}  // namespace detail

/**
 * @brief Unnormalized transform along one axis of a row-major array.
 *
 * Computes out[m] = sum_k in[k] exp(sign * 2 pi i m k / N) along `axis`, for every
 * line of the array and every one of the `channels` interleaved value channels.
 */
inline void transform_axis(std::vector<cplx>& data, const std::vector<std::size_t>& shape, std::size_t channels,
                           std::size_t axis, int sign) {
    const std::size_t n = shape[axis];
    std::size_t inner = channels;
    for (std::size_t a = axis + 1; a < shape.size(); ++a) inner *= shape[a];
    std::size_t outer = 1;
    for (std::size_t a = 0; a < axis; ++a) outer *= shape[a];
    const fftw_plan plan = detail::plan_for(n, sign);
    const std::size_t lines = outer * inner;

    const std::size_t workers = std::min<std::size_t>(thread_count(), std::max<std::size_t>(1, lines / 8));
    const std::size_t block = (lines + workers - 1) / workers;
    auto run = [&](std::size_t lo, std::size_t hi) {
        detail::FftwBuffer buf(n);
        auto* b = reinterpret_cast<cplx*>(buf.data);
        for (std::size_t line = lo; line < hi; ++line) {
            const std::size_t o = line / inner, i = line % inner;
            cplx* base = data.data() + o * n * inner + i;
            for (std::size_t k = 0; k < n; ++k) b[k] = base[k * inner];
            fftw_execute_dft(plan, buf.data, buf.data);
            for (std::size_t k = 0; k < n; ++k) base[k * inner] = b[k];
        }
    };
    if (workers <= 1) {
        run(0, lines);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * block, hi = std::min(lines, lo + block);
        if (lo < hi) pool.emplace_back(run, lo, hi);
    }
    for (auto& t : pool) t.join();
}

/// Transform along every axis.
inline void transform_all(std::vector<cplx>& data, const std::vector<std::size_t>& shape, std::size_t channels,
                          int sign) {
    for (std::size_t a = 0; a < shape.size(); ++a) transform_axis(data, shape, channels, a, sign);
}

}  // namespace tubeh::fft
