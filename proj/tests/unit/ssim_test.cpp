#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "platefocus/errors.hpp"
#include "platefocus/ssim.hpp"

namespace platefocus {
namespace {

Field blob(int nx, int ny, double cx, double cy, double width) {
    Field f(nx, ny);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
            f(ix, iy) = std::exp(-((ix - cx) * (ix - cx) + (iy - cy) * (iy - cy)) / (2 * width * width));
    return f;
}

TEST(Ssim, MatchesDirectPerWindowReference) {
    std::mt19937_64 rng(41);
    const SsimParams params;
    for (int trial = 0; trial < 20; ++trial) {
        const Field a = oracle::random_field(rng, 16, 16);
        const Field b = oracle::random_field(rng, 16, 16);
        const double expected = oracle::direct_ssim(a, b, 11, true, 1.5, params.c1(), params.c2());
        EXPECT_NEAR(ssim(a, b, params), expected, 1e-10);
    }
}

TEST(Ssim, UniformWindowMatchesReference) {
    std::mt19937_64 rng(43);
    SsimParams params;
    params.kind = WindowKind::uniform;
    params.window = 7;
    for (int trial = 0; trial < 5; ++trial) {
        const Field a = oracle::random_field(rng, 20, 13);
        const Field b = oracle::random_field(rng, 20, 13);
        EXPECT_NEAR(ssim(a, b, params), oracle::direct_ssim(a, b, 7, false, 0.0, params.c1(), params.c2()), 1e-10);
    }
}

TEST(Ssim, IdentitySymmetryAndScaleInvariance) {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 10; ++trial) {
        const Field a = oracle::random_field(rng, 24, 30);
        const Field b = oracle::random_field(rng, 24, 30);
        EXPECT_EQ(ssim(a, a), 1.0);
        EXPECT_EQ(ssim(a, b), ssim(b, a));
        EXPECT_LE(ssim(a, b), 1.0);
        Field scaled = a;
        for (double& v : scaled.values()) v *= 4.0;  // power of two keeps normalization exact
        EXPECT_EQ(ssim(a, scaled), 1.0);
        Field odd = a;
        for (double& v : odd.values()) v *= 3.7;
        EXPECT_NEAR(ssim(a, odd), 1.0, 1e-14);
    }
}

TEST(Ssim, ZeroImagesScoreOne) {
    const Field z(16, 16, 0.0);
    EXPECT_EQ(ssim(z, z), 1.0);
}

TEST(Ssim, ShiftedBlobScoresLower) {
    const Field base = blob(64, 64, 20, 30, 3.0);
    const double near = ssim(base, blob(64, 64, 24, 30, 3.0));
    const double far = ssim(base, blob(64, 64, 20 + 11, 30, 3.0));
    const double farther = ssim(base, blob(64, 64, 20 + 22, 30, 3.0));
    EXPECT_LT(far, 1.0);
    EXPECT_LT(far, near);
    EXPECT_LT(farther, far);
}

TEST(Ssim, ReferenceObjectAgreesWithFreeFunction) {
    std::mt19937_64 rng(53);
    const Field ref = oracle::random_field(rng, 40, 25);
    const SsimReference cached(ref, SsimParams{});
    for (int trial = 0; trial < 5; ++trial) {
        const Field c = oracle::random_field(rng, 40, 25);
        EXPECT_EQ(cached.score(c), ssim(c, ref));
    }
}

TEST(Ssim, ShapeErrors) {
    const Field a(16, 16, 1.0), b(16, 17, 1.0), tiny(8, 8, 1.0);
    try {
        ssim(a, b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
    try {
        ssim(tiny, tiny);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(SsimParams, Validation) {
    SsimParams p;
    EXPECT_NO_THROW(p.validate());
    EXPECT_DOUBLE_EQ(p.c1(), 1e-4);
    EXPECT_DOUBLE_EQ(p.c2(), 9e-4);
    p.window = 10;
    EXPECT_THROW(p.validate(), Error);
    p.window = 1;
    EXPECT_THROW(p.validate(), Error);
    p = SsimParams{};
    p.k2 = 0.0;
    EXPECT_THROW(p.validate(), Error);
    EXPECT_EQ(parse_window_kind("uniform"), WindowKind::uniform);
    EXPECT_THROW(parse_window_kind("box"), Error);
    const auto taps = SsimParams{}.taps();
    double sum = 0.0;
    for (double t : taps) sum += t;
    EXPECT_NEAR(sum, 1.0, 1e-15);
    EXPECT_EQ(taps.front(), taps.back());
}

TEST(NormalizeByMax, ScalesPeakToOne) {
    Field f(3, 1);
    f(0, 0) = 2.0;
    f(1, 0) = 8.0;
    f(2, 0) = 0.0;
    const Field n = normalize_by_max(f);
    EXPECT_EQ(n(1, 0), 1.0);
    EXPECT_EQ(n(0, 0), 0.25);
    EXPECT_EQ(normalize_by_max(Field(2, 2, 0.0)), Field(2, 2, 0.0));
}

}  // namespace
}  // namespace platefocus
