#include "test_util.hpp"

using namespace tubeh;
using tubeh::testing::kInf;
using tubeh::testing::expect_kind;
using tubeh::testing::gaussian_field;

namespace {

const Cone kHalfLine = Cone::half_line(1);
const GridSpec kSpectralGrid = GridSpec::make(1, 512, 512.0 / 3.0);

double half_plane_poisson(double x, double y) { return y / (kPi * (x * x + y * y)); }

std::vector<RVec> dyadic(int k_first, int k_last) {
    std::vector<RVec> ys;
    for (int k = k_first; k <= k_last; ++k) ys.push_back(RVec{std::pow(2.0, -k)});
    return ys;
}

}  // namespace

TEST(PoissonIntegral, ConstantData) {
    const KernelEvaluator E(kHalfLine);
    GridField h(GridSpec::make(1, 1 << 14, 512.0), 2);
    for (std::size_t i = 0; i < h.size(); ++i) {
        h.at(i, 0) = 1.5;
        h.at(i, 1) = cplx(0.0, -2.0);
    }
    const CVec v = poisson_integral(h, TubePoint::make(kHalfLine, RVec{0.4}, RVec{0.25}), E, 2e-3);
    EXPECT_NEAR(std::abs(v[0] - 1.5), 0.0, 1.5 * 2e-3);
    EXPECT_NEAR(std::abs(v[1] - cplx(0.0, -2.0)), 0.0, 2.0 * 2e-3);
}

// P_1 * P_y = P_{1+y}; scipy gives 0.2040447988357633 at x=0.3, y=0.5
TEST(PoissonIntegral, HalfPlaneSemigroup) {
    const KernelEvaluator E(kHalfLine);
    const GridSpec g = GridSpec::make(1, 1 << 14, 1024.0);
    const GridField h = GridField::from_function(g, 1, Side::Physical, [](const RVec& t, std::span<cplx> v) {
        v[0] = half_plane_poisson(t[0], 1.0);
    });
    EXPECT_NEAR(poisson_integral(h, TubePoint::make(kHalfLine, RVec{0.3}, RVec{0.5}), E)[0].real(), 0.2040447988357633,
                5e-4);
    for (double x : {-2.0, 0.0, 1.0})
        for (double y : {0.25, 1.0, 3.0})
            EXPECT_NEAR(poisson_integral(h, TubePoint::make(kHalfLine, RVec{x}, RVec{y}), E)[0].real(),
                        half_plane_poisson(x, 1.0 + y), 5e-4);
}

TEST(PoissonIntegral, DecaysLikeGrowthBound) {
    const KernelEvaluator E(kHalfLine);
    const GridField h = gaussian_field(GridSpec::make(1, 4096, 256.0));
    const auto Cp = CompactSubcone::from_generators(kHalfLine, {RVec{1.0}});
    std::vector<TubePoint> zs;
    for (double y : {1.0, 4.0, 16.0, 64.0}) zs.push_back(TubePoint::make(kHalfLine, RVec{0.0}, RVec{y}));
    EXPECT_TRUE(growth_bound_check(h, 2.0, E, Cp, zs).holds());
    const double a = std::abs(poisson_integral(h, zs[2], E)[0]), b = std::abs(poisson_integral(h, zs[3], E)[0]);
    EXPECT_NEAR(a / b, 4.0, 0.05);  // Q(iy; t) ~ 1/(pi y) for y >> 1
}

TEST(PoissonSlice, MatchesPointwiseIntegral) {
    const KernelEvaluator E(Cone::nrant({0, 0}));
    const GridSpec g = GridSpec::make(2, 64, 16.0);
    const GridField h = gaussian_field(g);
    const RVec y{0.5, 0.3};
    const GridField s = poisson_slice(h, y, E);
    for (std::size_t i : {std::size_t{0}, std::size_t{2080}, std::size_t{3001}}) {
        const CVec direct = poisson_integral(h, TubePoint::make(E.cone(), g.point(i), y), E);
        EXPECT_NEAR(std::abs(s.at(i, 0) - direct[0]), 0.0, 1e-12);
    }
}

TEST(Contraction, PoissonSlicesDoNotIncreaseNorm) {
    const KernelEvaluator E(kHalfLine);
    const GridField h = gaussian_field(GridSpec::make(1, 1 << 14, 32.0));
    for (double p : {1.0, 2.0, 4.0, kInf}) {
        const auto prof = hardy_profile(h, p, E, dyadic(-1, 6));
        EXPECT_LE(prof.sup, lp_norm(h, p) * (1 + 1e-3)) << p;
    }
}

TEST(HardyProfile, ZeroField) {
    const auto prof = hardy_profile(GridField(kSpectralGrid, 2), 2.0, KernelEvaluator(kHalfLine), dyadic(0, 3));
    for (const auto& s : prof.slices) EXPECT_EQ(s.norm, 0.0);
}

TEST(BoundaryConvergence, GaussianFirstOrder) {
    const KernelEvaluator E(kHalfLine);
    const GridField h = gaussian_field(GridSpec::make(1, 1 << 14, 32.0));
    const auto t = boundary_convergence(h, 2.0, E, dyadic(0, 8));
    EXPECT_TRUE(t.decreasing(0.05));
    EXPECT_NEAR(t.fitted_order, 1.0, 0.15);
}

TEST(BoundaryConvergence, SteepProfileSlower) {
    const KernelEvaluator E(kHalfLine);
    const GridSpec g = GridSpec::make(1, 1 << 14, 32.0);
    const GridField h = GridField::from_function(g, 1, Side::Physical, [](const RVec& t, std::span<cplx> v) {
        v[0] = 0.5 * (std::tanh(8 * (t[0] + 1)) - std::tanh(8 * (t[0] - 1)));
    });
    const auto smooth = boundary_convergence(gaussian_field(g), 2.0, E, dyadic(2, 8));
    const auto steep = boundary_convergence(h, 2.0, E, dyadic(2, 8));
    EXPECT_TRUE(steep.decreasing(0.05));
    EXPECT_GT(steep.fitted_order, 0.3);
    EXPECT_LT(steep.fitted_order, smooth.fitted_order);
}

TEST(BoundaryConvergence, ZeroField) {
    const auto t = boundary_convergence(GridField(kSpectralGrid, 1), 2.0, KernelEvaluator(kHalfLine), dyadic(0, 4));
    for (const auto& r : t.rows) EXPECT_EQ(r.error, 0.0);
}

TEST(BoundaryConvergence, RejectsIncreasingHeights) {
    expect_kind(ErrorKind::NotConverging, [] {
        boundary_convergence(GridField(kSpectralGrid, 1), 2.0, KernelEvaluator(kHalfLine), std::vector<RVec>{RVec{0.1}, RVec{1.0}});
    });
}

TEST(WeakStar, BoundedDataConverges) {
    const KernelEvaluator E(kHalfLine);
    // spacing 1/128 stays below the smallest height
    const GridSpec g = GridSpec::make(1, 4096, 32.0);
    const GridField h = GridField::from_function(g, 1, Side::Physical, [](const RVec& t, std::span<cplx> v) {
        v[0] = std::tanh(8 * t[0]);
    });
    const auto t = weak_star_convergence(h, E, dyadic(0, 6));
    EXPECT_TRUE(t.decreasing(0.05));
    EXPECT_LT(t.final_error(), t.rows.front().error);
}

// one-sided spectrum: Cauchy and Poisson integrals of h both reproduce f.
// On spacing 1/3 the two-sided Poisson spectrum aliases at about e^{-4 pi y}, so heights start at 1.
TEST(CauchyIntegral, AgreesWithPoissonOnHardyData) {
    const KernelEvaluator E(kHalfLine);
    const auto f = spectral_synthetic(kHalfLine, kSpectralGrid, make_spectral_data({1}, 3, 1));
    for (double x : {0.0, 0.5, -1.9})
        for (double y : {1.0, 1.5}) {
            const TubePoint z = TubePoint::make(kHalfLine, RVec{x}, RVec{y});
            const CVec exact = f(z), c = cauchy_integral(f.boundary(), z, E), q = poisson_integral(f.boundary(), z, E);
            double num = 0, den = 0, numq = 0;
            for (std::size_t k = 0; k < exact.size(); ++k) {
                num += std::norm(c[k] - exact[k]);
                numq += std::norm(q[k] - exact[k]);
                den += std::norm(exact[k]);
            }
            EXPECT_LT(std::sqrt(num / den), 1e-4);
            EXPECT_LT(std::sqrt(numq / den), 1e-4);
        }
}

TEST(CauchyIntegral, WrongSideSpectrumVanishes) {
    const KernelEvaluator E(kHalfLine);
    const auto f = spectral_synthetic(Cone::half_line(-1), kSpectralGrid, make_spectral_data({-1}, 1, 2));
    const TubePoint z = TubePoint::make(kHalfLine, RVec{0.2}, RVec{1.0});
    const double scale = lp_norm(f.boundary(), 2.0);
    EXPECT_LT(std::abs(cauchy_integral(f.boundary(), z, E)[0]) / scale, 1e-6);
}

TEST(DecomposedHardy, SingleOrthantMatchesDirectProfile) {
    const KernelEvaluator E(Cone::nrant({0, 0}));
    const GridField h = gaussian_field(GridSpec::make(2, 64, 16.0));
    const auto prof = decomposed_hardy_bound(h, 2.0, E, {0.5, 1.0}, 3, 0.3, 4);
    ASSERT_EQ(prof.subcone_sups.size(), 1u);
    std::vector<RVec> ys;
    for (const auto& s : prof.slices) ys.push_back(s.y);
    EXPECT_NEAR(prof.sup, hardy_profile(h, 2.0, E, ys).sup, 1e-14);
}

TEST(DecomposedHardy, LightConeBoundaryRaysBelowA) {
    const KernelEvaluator E(Cone::light_cone(2));
    const GridField h = gaussian_field(GridSpec::make(2, 256, 16.0));
    const auto prof = decomposed_hardy_bound(h, 2.0, E, {0.25, 1.0}, 3, 0.3, 4);
    ASSERT_EQ(prof.subcone_sups.size(), 2u);
    EXPECT_DOUBLE_EQ(prof.sup, std::max(prof.subcone_sups[0], prof.subcone_sups[1]));
    EXPECT_FALSE(prof.boundary_slices.empty());
    for (const auto& s : prof.boundary_slices) EXPECT_LE(s.norm, prof.sup + 1e-6);
    EXPECT_LE(prof.sup, lp_norm(h, 2.0) * (1 + 1e-3));
}
