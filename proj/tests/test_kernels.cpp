#include "test_util.hpp"

#include <random>

using namespace tubeh;
using tubeh::testing::expect_kind;

namespace {

const Cone kHalfLine = Cone::half_line(1);
const Cone kQuadrant = Cone::nrant({0, 0});

TubePoint tp(const Cone& C, RVec x, RVec y) { return TubePoint::make(C, x, y); }

}  // namespace

TEST(Cauchy, HalfLineAtI) {
    const KernelEvaluator E(kHalfLine);
    const cplx k = E.cauchy(tp(kHalfLine, RVec{0.0}, RVec{1.0}), RVec{0.0});
    EXPECT_NEAR(k.real(), 0.1591549430918953, 1e-12);
    EXPECT_NEAR(k.imag(), 0.0, 1e-15);
    const cplx kx = E.cauchy(tp(kHalfLine, RVec{3.7}, RVec{1.0}), RVec{3.7});
    EXPECT_NEAR(std::abs(kx - k), 0.0, 1e-15);
}

TEST(Cauchy, QuadrantProduct) {
    const KernelEvaluator E(kQuadrant);
    const cplx k = E.cauchy(tp(kQuadrant, RVec{0.0, 0.0}, RVec{1.0, 1.0}), RVec{0.0, 0.0});
    EXPECT_NEAR(k.real(), 0.025330295910584444, 1e-12);
    EXPECT_NEAR(k.imag(), 0.0, 1e-15);
}

TEST(K2iy, Examples) {
    EXPECT_NEAR(KernelEvaluator(kHalfLine).k2iy(RVec{1.0}), 0.07957747154594767, 1e-12);
    EXPECT_NEAR(KernelEvaluator(kQuadrant).k2iy(RVec{1.0, 2.0}), 0.0031662869888230555, 1e-12);
}

// scipy dblquad over the cone: tests/oracles/derive_values.py
TEST(K2iy, LightConeAxis) {
    EXPECT_NEAR(KernelEvaluator(Cone::light_cone(2)).k2iy(RVec{1.0, 0.0}), 0.012665147955292012, 1e-12);
}

TEST(Poisson, Examples) {
    const KernelEvaluator E(kHalfLine);
    EXPECT_NEAR(E.poisson(tp(kHalfLine, RVec{0.0}, RVec{1.0}), RVec{0.0}), 0.3183098861837907, 1e-12);
    EXPECT_NEAR(E.poisson(tp(kHalfLine, RVec{2.0}, RVec{1.0}), RVec{2.0}), 0.3183098861837907, 1e-12);
    const KernelEvaluator E2(kQuadrant);
    EXPECT_NEAR(E2.poisson(tp(kQuadrant, RVec{0.0, 0.0}, RVec{1.0, 1.0}), RVec{0.0, 0.0}), 0.10132118364233778, 1e-12);
}

TEST(Poisson, HalfPlaneIdentity) {
    const KernelEvaluator E(kHalfLine);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        const double x = -5 + 10 * U(rng), y = 0.05 + 5 * U(rng), t = -5 + 10 * U(rng);
        EXPECT_NEAR(E.poisson(tp(kHalfLine, RVec{x}, RVec{y}), RVec{t}), y / (kPi * ((x - t) * (x - t) + y * y)), 1e-10);
    }
}

TEST(Poisson, NonnegativeAndReflectionSymmetric) {
    const KernelEvaluator E(Cone::nrant({0, 1}));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    const RVec y{0.7, -1.3};
    for (int k = 0; k < 200; ++k) {
        const RVec x{U(rng), U(rng)}, t{U(rng), U(rng)};
        const TubePoint z = TubePoint::make(E.cone(), x, y);
        const double q = E.poisson(z, t);
        EXPECT_GE(q, 0.0);
        EXPECT_NEAR(E.poisson(z, RVec{2 * x[0] - t[0], t[1]}), q, 1e-12 * q);
        EXPECT_NEAR(E.poisson(z, RVec{t[0], 2 * x[1] - t[1]}), q, 1e-12 * q);
    }
}

TEST(Quadrature, AgreesWithClosedForm) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (const Cone& C : {kHalfLine, Cone::half_line(-1), kQuadrant, Cone::light_cone(2),
                          Cone::polyhedral({RVec{1.0, -0.5}, RVec{0.2, 1.0}}), Cone::light_cone(3)}) {
        const KernelEvaluator E(C);
        std::vector<std::pair<RVec, RVec>> probes;
        for (const auto& u : sample_projection(C, 6, 3)) {
            RVec x(C.dim());
            for (int a = 0; a < C.dim(); ++a) x[a] = U(rng);
            probes.push_back({x, C.interior_margin(u) > 0.05 ? u : central_direction(C)});
        }
        EXPECT_LT(cross_validate(E, probes), 1e-6) << C.describe();
    }
}

TEST(Kernel, HomogeneityDegreeMinusN) {
    for (const Cone& C : {kHalfLine, kQuadrant, Cone::light_cone(2), Cone::light_cone(3)}) {
        const KernelEvaluator E(C);
        RVec u(C.dim(), 0.3), y = central_direction(C);
        const cplx k1 = E.closed_form(u, y), k3 = E.closed_form(u * 3.0, y * 3.0);
        EXPECT_NEAR(std::abs(k3 - k1 * std::pow(3.0, -C.dim())) / std::abs(k1), 0.0, 1e-12) << C.describe();
    }
}

TEST(Kernel, PointNearBoundaryRejected) {
    expect_kind(ErrorKind::PointOutsideTube, [] { tp(kQuadrant, RVec{0.0, 0.0}, RVec{1.0, 1e-9}); });
    expect_kind(ErrorKind::PointOutsideTube, [] { tp(kHalfLine, RVec{0.0}, RVec{-1.0}); });
}

TEST(PoissonMass, HalfLine) {
    const KernelEvaluator E(kHalfLine);
    const GridSpec g = GridSpec::make(1, 1 << 14, 512.0);
    for (double y : {0.25, 0.5}) EXPECT_NEAR(poisson_mass(E, tp(kHalfLine, RVec{0.0}, RVec{y}), g, 2e-3), 1.0, 2e-3);
}

TEST(PoissonMass, Quadrant) {
    const KernelEvaluator E(kQuadrant);
    const GridSpec g = GridSpec::make(2, 4096, 256.0);
    EXPECT_NEAR(poisson_mass(E, tp(kQuadrant, RVec{0.0, 0.0}, RVec{0.25, 0.25}), g, 5e-3), 1.0, 5e-3);
}

TEST(PoissonMass, TailTooFatOnSmallGrid) {
    const KernelEvaluator E(kHalfLine);
    expect_kind(ErrorKind::TailTooFat,
                [&] { poisson_mass(E, tp(kHalfLine, RVec{0.0}, RVec{1.0}), GridSpec::make(1, 256, 16.0), 1e-3); });
}

TEST(PoissonTail, MatchesArctanForm) {
    const KernelEvaluator E(kHalfLine);
    const GridSpec g = GridSpec::make(1, 1024, 64.0);
    const double R = 32.0 - g.spacing();
    EXPECT_NEAR(poisson_tail_estimate(E, tp(kHalfLine, RVec{0.0}, RVec{1.0}), g), 1.0 - 2.0 / kPi * std::atan(R), 1e-12);
}

TEST(BConstant, ClosedForms) {
    EXPECT_NEAR(b_constant(KernelEvaluator(kHalfLine)), 1.0 / (4 * kPi), 1e-15);
    EXPECT_NEAR(b_constant(KernelEvaluator(kQuadrant)), 2.0 / (16 * kPi * kPi), 1e-15);
    EXPECT_NEAR(b_constant(KernelEvaluator(Cone::light_cone(2))), 1.0 / (8 * kPi * kPi), 1e-15);
}

TEST(BConstant, LowerBoundsK2iy) {
    for (const Cone& C : {kQuadrant, Cone::light_cone(2), Cone::polyhedral({RVec{1.0, -0.5}, RVec{0.2, 1.0}})}) {
        const KernelEvaluator E(C);
        const double B = b_constant(E);
        for (const auto& u : sample_projection(C, 300, 8))
            if (C.interior_margin(u) > 1e-3) {
                EXPECT_GE(E.k2iy(u), B * (1 - kBoundRoundoff)) << C.describe();
            }
    }
}

// scipy quadrature of |K(x+i)|^2 gives 0.28209479177387814; the grid truncates slightly below it
TEST(KernelBounds, HalfLineQ2) {
    const KernelEvaluator E(kHalfLine);
    const auto Cp = CompactSubcone::from_generators(kHalfLine, {RVec{1.0}});
    const auto r = kernel_bounds_report(E, Cp, tp(kHalfLine, RVec{0.0}, RVec{1.0}), 2.0, GridSpec::make(1, 1 << 14, 4096.0));
    EXPECT_NEAR(r.lq_norm_cauchy, 0.28209479177387814, 2e-4);
    EXPECT_NEAR(r.lq_bound_cauchy, 0.3989422804014327, 1e-12);
    EXPECT_NEAR(r.k2iy, r.k2iy_lower_bound, 1e-15);
    EXPECT_NEAR(r.sup_cauchy, 1.0 / kTwoPi, 1e-12);
    EXPECT_NEAR(r.sup_bound_cauchy, 2.0, 1e-12);
    EXPECT_TRUE(r.all_hold());
}

TEST(KernelBounds, RandomConfigurationsHold) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const GridSpec g = GridSpec::make(2, 256, 64.0);
    for (const Cone& C : {kQuadrant, Cone::light_cone(2)}) {
        const KernelEvaluator E(C);
        const auto Cp = CompactSubcone::angular_shrink(C, 0.2, 0.1);
        for (const auto& u : Cp.sample_directions(5, 2)) {
            const TubePoint z = tp(C, RVec{U(rng), U(rng)}, u * (0.5 + U(rng)));
            for (double q : {2.0, 4.0}) EXPECT_TRUE(kernel_bounds_report(E, Cp, z, q, g).all_hold()) << C.describe();
        }
    }
}
