#pragma once

#include <gtest/gtest.h>

#include <tubeh/tubeh.hpp>

#include <functional>
#include <limits>

namespace tubeh::testing {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Asserts that fn throws tubeh::Error of the given kind.
inline void expect_kind(ErrorKind kind, const std::function<void()>& fn) {
    try {
        fn();
        ADD_FAILURE() << "expected " << to_string(kind) << ", nothing thrown";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), kind) << e.what();
    }
}

inline GridField gaussian_field(const GridSpec& g, double scale = 1.0, double shift = 0.0) {
    return GridField::from_function(g, 1, Side::Physical, [&](const RVec& t, std::span<cplx> out) {
        double r2 = 0.0;
        for (int a = 0; a < t.size(); ++a) r2 += (t[a] - shift) * (t[a] - shift);
        out[0] = scale * std::exp(-kPi * r2);
    });
}

}  // namespace tubeh::testing
