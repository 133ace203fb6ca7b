#include "test_util.hpp"

#include <random>

using namespace tubeh;
using tubeh::testing::expect_kind;

namespace {

const Cone kHalfLine = Cone::half_line(1);
const Cone kQuadrant = Cone::nrant({0, 0});

}  // namespace

TEST(Indicatrix, HalfLine) { EXPECT_NEAR(indicatrix(kHalfLine, RVec{-1.0}), 1.0, 1e-12); }

// numpy brute force over the unit quarter circle: tests/oracles/derive_values.py
TEST(Indicatrix, QuadrantValues) {
    EXPECT_NEAR(indicatrix(kQuadrant, RVec{1.0, 1.0}), -1.0, 1e-9);
    EXPECT_NEAR(indicatrix(kQuadrant, RVec{-1.0, -1.0}), 1.414213562373095, 1e-9);
}

TEST(Indicatrix, ClosedFormMatchesSampling) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (const Cone& C : {kQuadrant, Cone::light_cone(2), Cone::nrant({1, 0})})
        for (int k = 0; k < 20; ++k) {
            const RVec t{U(rng), U(rng)};
            EXPECT_NEAR(indicatrix(C, t), indicatrix_sampled(C, t), 2e-3 * (1 + t.norm())) << C.describe();
        }
}

TEST(DualContains, Examples) {
    EXPECT_TRUE(dual_contains(kQuadrant, RVec{2.0, 3.0}));
    EXPECT_FALSE(dual_contains(kQuadrant, RVec{-0.1, 5.0}));
    EXPECT_TRUE(dual_contains(kHalfLine, RVec{0.0}));
}

TEST(DualContains, AgreesWithIndicatrixSign) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const Cone C = Cone::light_cone(2);
    for (int k = 0; k < 500; ++k) {
        const RVec t{U(rng), U(rng)};
        if (std::abs(indicatrix(C, t)) < 1e-6) continue;
        EXPECT_EQ(dual_contains(C, t), indicatrix(C, t) <= 0.0);
    }
}

TEST(Delta, Examples) {
    EXPECT_NEAR(CompactSubcone::from_generators(kQuadrant, {RVec{1.0, 1.0}}).delta(), 0.7071067811865475, 1e-12);
    EXPECT_NEAR(CompactSubcone::from_generators(kHalfLine, {RVec{1.0}}).delta(), 1.0, 1e-12);
    EXPECT_NEAR(CompactSubcone::from_generators(kQuadrant, {RVec{1.0, 2.0}, RVec{2.0, 1.0}}).delta(),
                0.447213595499958, 1e-12);
}

TEST(Delta, SeparationHoldsOnSamples) {
    const auto Cp = CompactSubcone::from_generators(kQuadrant, {RVec{1.0, 2.0}, RVec{2.0, 1.0}});
    const double d = Cp.delta();
    const auto ys = Cp.sample_directions(200, 9);
    const auto ts = sample_projection(kQuadrant, 200, 10);
    for (const auto& y : ys)
        for (const auto& t : ts) ASSERT_GE(y.dot(t), d * y.norm() * t.norm() - 1e-12);
}

TEST(Delta, BoundaryGeneratorRejected) {
    expect_kind(ErrorKind::DegenerateSubcone,
                [] { CompactSubcone::from_generators(kQuadrant, {RVec{1.0, 0.0}}).delta(); });
}

TEST(Decompose, Examples) {
    EXPECT_EQ(decompose_nrants(kQuadrant).size(), 1u);
    EXPECT_EQ(decompose_nrants(kHalfLine).size(), 1u);
    const auto pieces = decompose_nrants(Cone::light_cone(2));
    ASSERT_EQ(pieces.size(), 2u);
    // one wedge in the (+,+) quadrant, one in (+,-)
    int upper = 0, lower = 0;
    for (const auto& S : pieces) {
        if (S.contains(RVec{1.0, 0.5})) ++upper;
        if (S.contains(RVec{1.0, -0.5})) ++lower;
        EXPECT_FALSE(S.contains(RVec{1.0, 1.5}));
    }
    EXPECT_EQ(upper, 1);
    EXPECT_EQ(lower, 1);
}

TEST(Decompose, PiecesCoverCone) {
    const Cone C = Cone::polyhedral({RVec{1.0, -2.0}, RVec{-1.0, 3.0}});
    const auto pieces = decompose_nrants(C);
    for (const auto& u : direction_lattice(2, 720)) {
        if (!C.contains(u) || C.interior_margin(u) < 1e-3 || std::abs(u[0]) < 1e-3 || std::abs(u[1]) < 1e-3)
            continue;
        int hits = 0;
        for (const auto& S : pieces) hits += S.contains(u);
        EXPECT_EQ(hits, 1);
    }
}

TEST(SampleProjection, HalfLine) {
    for (const auto& u : sample_projection(kHalfLine, 3, 1)) EXPECT_DOUBLE_EQ(u[0], 1.0);
}

TEST(SampleProjection, QuadrantMembership) {
    for (const auto& u : sample_projection(kQuadrant, 1000, 7)) {
        EXPECT_GT(u[0], 0.0);
        EXPECT_GT(u[1], 0.0);
        EXPECT_NEAR(u.norm(), 1.0, 1e-12);
    }
}

TEST(SampleProjection, LightConeAperture) {
    double lo = 1.0, hi = -1.0;
    for (const auto& u : sample_projection(Cone::light_cone(2), 1000, 2)) {
        const double a = std::atan2(u[1], u[0]);
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    EXPECT_NEAR(lo, -kPi / 4, 0.02);
    EXPECT_NEAR(hi, kPi / 4, 0.02);
}

TEST(SampleProjection, Deterministic) {
    const auto a = sample_projection(Cone::light_cone(2), 50, 4), b = sample_projection(Cone::light_cone(2), 50, 4);
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].to_vector(), b[k].to_vector());
}

TEST(Cone, PolyhedralRegularity) {
    expect_kind(ErrorKind::NonRegularCone, [] { Cone::polyhedral({RVec{1.0, 0.0}, RVec{-1.0, 0.0}}); });
    expect_kind(ErrorKind::NonRegularCone, [] { Cone::polyhedral({RVec{1.0, 1.0}}); });
}
