#include "test_util.hpp"

#include <filesystem>
#include <random>

using namespace tubeh;
using tubeh::testing::kInf;
using tubeh::testing::expect_kind;
using tubeh::testing::gaussian_field;

namespace {

const GridSpec kLine = GridSpec::make(1, 1024, 32.0);

GridField random_field(const GridSpec& g, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    GridField f(g, d);
    for (auto& v : f.raw()) v = {N(rng), N(rng)};
    return f;
}

}  // namespace

TEST(LpNorm, Zero) {
    for (double p : {1.0, 2.0, 4.0, kInf}) EXPECT_EQ(lp_norm(GridField(kLine, 2), p), 0.0);
}

TEST(LpNorm, GaussianL2) { EXPECT_NEAR(lp_norm(gaussian_field(kLine), 2.0), std::pow(2.0, -0.25), 1e-8); }

TEST(LpNorm, CoordinateAdditivity) {
    const GridField g = gaussian_field(kLine, std::pow(2.0, 0.25));
    GridField f(kLine, 2);
    for (std::size_t i = 0; i < f.size(); ++i) f.at(i, 0) = f.at(i, 1) = g.at(i, 0);
    EXPECT_NEAR(lp_norm(f, 2.0), std::sqrt(2.0), 1e-8);
}

TEST(LpNorm, RejectsSmallP) {
    expect_kind(ErrorKind::InvalidP, [] { lp_norm(GridField(kLine, 1), 0.5); });
}

TEST(Dft, ZeroStaysZero) { EXPECT_EQ(lp_norm(dft_forward(GridField(kLine, 1)), kInf), 0.0); }

TEST(Dft, GaussianSelfReciprocal) {
    const GridField F = dft_forward(gaussian_field(kLine));
    EXPECT_EQ(F.side(), Side::Frequency);
    const GridSpec& d = F.spec();
    for (std::size_t i = 0; i < F.size(); ++i) {
        const double x = d.point(i)[0];
        if (std::abs(x) > 4.0) continue;
        EXPECT_NEAR(std::abs(F.at(i, 0) - std::exp(-kPi * x * x)), 0.0, 1e-8) << x;
    }
}

TEST(Dft, ShiftRule) {
    const double a = 0.75;  // a whole number of grid steps
    const GridField F = dft_forward(gaussian_field(kLine));
    const GridField Fs = dft_forward(gaussian_field(kLine, 1.0, a));
    for (std::size_t i = 0; i < F.size(); ++i) {
        const double x = F.spec().point(i)[0];
        if (std::abs(x) > 4.0) continue;
        const cplx expected = std::exp(cplx(0.0, kTwoPi * a * x)) * F.at(i, 0);
        EXPECT_NEAR(std::abs(Fs.at(i, 0) - expected), 0.0, 1e-8) << x;
    }
}

TEST(Dft, RoundTrip) {
    const GridSpec g = GridSpec::make(2, 64, 8.0);
    const GridField f = random_field(g, 3, 11);
    const GridField back = dft_inverse(dft_forward(f));
    EXPECT_EQ(back.side(), Side::Physical);
    EXPECT_LT(lp_norm(back - f, 2.0) / lp_norm(f, 2.0), 1e-10);
}

TEST(Dft, DualGridExtent) {
    const GridField F = dft_forward(gaussian_field(kLine));
    EXPECT_EQ(F.spec().points, kLine.points);
    EXPECT_DOUBLE_EQ(F.spec().extent, kLine.points / kLine.extent);
}

TEST(Parseval, Gaussian) { EXPECT_LT(parseval_check(gaussian_field(kLine)), 1e-10); }

TEST(Parseval, RandomBandLimitedD4) {
    const GridSpec g = GridSpec::make(1, 512, 16.0);
    GridField F = dft_forward(random_field(g, 4, 12));
    for (std::size_t i = 0; i < F.size(); ++i)
        if (std::abs(F.spec().point(i)[0]) > 4.0)
            for (std::size_t c = 0; c < 4; ++c) F.at(i, c) = 0.0;
    EXPECT_LT(parseval_check(dft_inverse(F)), 1e-8);
}

TEST(Parseval, Spike) {
    GridField f(kLine, 1);
    f.at(300, 0) = 2.5;
    EXPECT_LT(parseval_check(f), 1e-8);
}

TEST(Parseval, ZeroFieldRejected) {
    expect_kind(ErrorKind::ZeroField, [] { parseval_check(GridField(kLine, 1)); });
}

TEST(HausdorffYoung, P2IsParseval) {
    EXPECT_NEAR(hausdorff_young_check(random_field(kLine, 2, 4), 2.0).ratio, 1.0, 1e-8);
}

TEST(HausdorffYoung, P1Gaussian) {
    const auto r = hausdorff_young_check(gaussian_field(kLine), 1.0);
    EXPECT_LE(r.ratio, 1.0 + 1e-6);
    EXPECT_NEAR(r.ratio, 1.0, 1e-8);  // equality for nonnegative data
}

// scipy quadrature of both sides: tests/oracles/derive_values.py
TEST(HausdorffYoung, P43Gaussian) {
    const auto r = hausdorff_young_check(gaussian_field(kLine), 4.0 / 3.0);
    EXPECT_LE(r.ratio, 1.0 + 1e-6);
    EXPECT_NEAR(r.ratio, 0.9366870743752482, 1e-8);
}

TEST(HausdorffYoung, RandomFieldsBelowOne) {
    for (std::uint64_t s = 0; s < 5; ++s)
        for (double p : {1.0, 4.0 / 3.0, 1.7}) EXPECT_LE(hausdorff_young_check(random_field(kLine, 2, s), p).ratio, 1.0 + 1e-6);
}

TEST(HausdorffYoung, RejectsPAboveTwo) {
    expect_kind(ErrorKind::InvalidP, [] { hausdorff_young_check(gaussian_field(kLine), 3.0); });
}

TEST(GridSpec, BudgetEnforced) {
    set_grid_budget(1000);
    expect_kind(ErrorKind::InvalidGrid, [] { GridSpec::make(2, 64, 8.0); });
    set_grid_budget(kDefaultGridBudget);
}

TEST(GridSpec, RejectsBadShapes) {
    expect_kind(ErrorKind::InvalidGrid, [] { GridSpec::make(4, 8, 1.0); });
    expect_kind(ErrorKind::InvalidGrid, [] { GridSpec::make(1, 8, -1.0); });
}

TEST(GridIo, BinaryRoundTrip) {
    const GridField f = random_field(GridSpec::make(2, 16, 4.0), 3, 8);
    const auto path = std::filesystem::temp_directory_path() / "tubeh_grid_io_test.bin";
    write_binary(f, path);
    const GridField g = read_binary(path);
    std::filesystem::remove(path);
    EXPECT_EQ(g.spec(), f.spec());
    EXPECT_EQ(g.raw(), f.raw());
}
