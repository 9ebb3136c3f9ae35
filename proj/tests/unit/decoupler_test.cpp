#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <set>

#include "oracles.hpp"
#include "platefocus/decoupler.hpp"
#include "platefocus/errors.hpp"

namespace platefocus {
namespace {

TEST(Accept, ProseRule) {
    EXPECT_TRUE(accept(0.7, 0.6, 0.0, AcceptRule::prose));
    EXPECT_TRUE(accept(0.7, 0.6, 0.999, AcceptRule::prose));
    EXPECT_TRUE(accept(0.5, 0.6, 0.1, AcceptRule::prose));
    EXPECT_FALSE(accept(0.5, 0.95, 0.1, AcceptRule::prose));
    EXPECT_FALSE(accept(0.5, 0.6, 0.4, AcceptRule::prose));
}

TEST(Accept, LiteralRuleIsThePrintedCondition) {
    EXPECT_TRUE(accept(0.5, 0.6, 0.0, AcceptRule::literal));
    EXPECT_FALSE(accept(0.7, 0.6, 0.3, AcceptRule::literal));
    EXPECT_TRUE(accept(0.7, 0.6, 0.5, AcceptRule::literal));
}

TEST(Accept, EscapeFrequencyAtLowSimilarity) {
    Rng rng(97);
    const int trials = 100000;
    int accepted = 0;
    for (int t = 0; t < trials; ++t) accepted += accept(0.2, 0.3, rng.uniform01(), AcceptRule::prose);
    EXPECT_NEAR(static_cast<double>(accepted) / trials, 0.70, 0.01);
}

TEST(Accept, ParseAndPrint) {
    EXPECT_EQ(parse_accept_rule("prose"), AcceptRule::prose);
    EXPECT_EQ(parse_accept_rule(to_string(AcceptRule::literal)), AcceptRule::literal);
    EXPECT_THROW(parse_accept_rule("metropolis"), Error);
}

TEST(Perturb, ChangesExactlyPerturbCountEntriesWithinBounds) {
    AnnealConfig cfg;
    Rng rng(101);
    GainSpectrum g = random_gains(rng);
    // push some entries onto the bounds so clamping is exercised
    for (std::size_t f = 0; f < 200; ++f) g[f] = (f % 2) ? 0.0 : cfg.gain_max;
    for (int draw = 0; draw < 10000; ++draw) {
        const GainSpectrum h = perturb(g, cfg, rng);
        int changed = 0;
        for (std::size_t f = 0; f < GainSpectrum::kEntries; ++f) {
            if (h[f] != g[f]) {
                ++changed;
                EXPECT_LE(std::abs(h[f] - g[f]), cfg.perturb_scale);
            }
            ASSERT_GE(h[f], 0.0);
            ASSERT_LE(h[f], cfg.gain_max);
        }
        ASSERT_EQ(changed, cfg.perturb_count);
        g = h;
    }
}

TEST(Perturb, ZeroScaleIsIdentity) {
    AnnealConfig cfg;
    cfg.perturb_scale = 0.0;
    Rng rng(103);
    const GainSpectrum g = random_gains(rng);
    EXPECT_EQ(perturb(g, cfg, rng), g);
}

TEST(Perturb, CoversTheWholeMatrix) {
    AnnealConfig cfg;
    cfg.perturb_count = 1800;
    Rng rng(107);
    const GainSpectrum g = random_gains(rng);
    const GainSpectrum h = perturb(g, cfg, rng);
    for (std::size_t f = 0; f < GainSpectrum::kEntries; ++f) EXPECT_NE(h[f], g[f]);
}

TEST(AnnealConfig, Validation) {
    AnnealConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    auto bad = [](auto mutate) {
        AnnealConfig c;
        mutate(c);
        try {
            c.validate();
        } catch (const Error& e) {
            return e.kind() == ErrorKind::Config;
        }
        return false;
    };
    EXPECT_TRUE(bad([](AnnealConfig& c) { c.iterations = 0; }));
    EXPECT_TRUE(bad([](AnnealConfig& c) { c.perturb_count = 0; }));
    EXPECT_TRUE(bad([](AnnealConfig& c) { c.perturb_count = 1801; }));
    EXPECT_TRUE(bad([](AnnealConfig& c) { c.perturb_scale = 0.0; }));
    EXPECT_TRUE(bad([](AnnealConfig& c) { c.perturb_scale = 10.5; }));
}

class AnnealFixture : public ::testing::Test {
protected:
    PlateSpec spec = oracle::small_plate(45, 92);
    ModalBasis basis = build_modal_basis(spec, ActuatorLayout::quincunx(spec), 160.0, 300.0);
    ResponseCache cache{basis};
    AnnealConfig cfg = [] {
        AnnealConfig c;
        c.iterations = 300;
        c.seed = 7;
        return c;
    }();
};

TEST_F(AnnealFixture, TrajectoryAndBestAreConsistent) {
    const DecoupleResult r = anneal(basis, cache, {20e-3, 50e-3}, SsimParams{}, cfg);
    ASSERT_EQ(r.trajectory.size(), 301u);
    EXPECT_EQ(r.trajectory.front().step, 0);
    double best = -2.0;
    for (std::size_t k = 0; k < r.trajectory.size(); ++k) {
        EXPECT_EQ(r.trajectory[k].step, static_cast<int>(k));
        best = std::max(best, r.trajectory[k].current_ssim);
        EXPECT_EQ(r.trajectory[k].best_ssim, best);
        if (k) {
            EXPECT_GE(r.trajectory[k].best_ssim, r.trajectory[k - 1].best_ssim);
        }
    }
    EXPECT_EQ(r.best_ssim, best);
    EXPECT_NO_THROW(r.best_gains.validate());

    // re-evaluated from scratch
    const double again = ssim(phasor_energy(basis, r.best_gains), target_energy(basis, r.target));
    EXPECT_NEAR(again, r.best_ssim, 1e-12);
    const ActuatorPhasor collapsed = collapse_gains(r.best_gains);
    for (std::size_t i = 0; i < kActuatorCount; ++i) {
        EXPECT_EQ(collapsed.amplitude[i], r.best_phasors.amplitude[i]);
        EXPECT_EQ(collapsed.phase_deg[i], r.best_phasors.phase_deg[i]);
    }
}

TEST_F(AnnealFixture, SameSeedSameResult) {
    const DecoupleResult a = anneal(basis, cache, {30e-3, 40e-3}, SsimParams{}, cfg);
    const DecoupleResult b = anneal(basis, cache, {30e-3, 40e-3}, SsimParams{}, cfg);
    EXPECT_EQ(a.best_gains, b.best_gains);
    EXPECT_EQ(a.best_ssim, b.best_ssim);
    ASSERT_EQ(a.trajectory.size(), b.trajectory.size());
    for (std::size_t k = 0; k < a.trajectory.size(); ++k) EXPECT_EQ(a.trajectory[k].current_ssim, b.trajectory[k].current_ssim);
    AnnealConfig other = cfg;
    other.seed = 8;
    EXPECT_NE(anneal(basis, cache, {30e-3, 40e-3}, SsimParams{}, other).best_gains, a.best_gains);
}

TEST_F(AnnealFixture, ImprovesOnTheRandomStart) {
    const DecoupleResult r = anneal(basis, cache, {50e-3, 110e-3}, SsimParams{}, cfg);
    EXPECT_GT(r.best_ssim, r.trajectory.front().current_ssim);
}

TEST_F(AnnealFixture, ActuatorTargetIsExactlyRealizable) {
    GainSpectrum direct;
    direct.at(kCentralActuator, 0) = 1.0;
    const Point at = basis.layout().positions[kCentralActuator];
    EXPECT_EQ(ssim(phasor_energy(cache, direct), target_energy(basis, at)), 1.0);
    AnnealConfig c = cfg;
    c.iterations = 2000;
    EXPECT_GE(anneal(basis, cache, at, SsimParams{}, c).best_ssim, 0.99);
}

TEST_F(AnnealFixture, CompactModeKeepsContracts) {
    AnnealConfig c = cfg;
    c.compact = true;
    const DecoupleResult r = anneal(basis, cache, {25e-3, 60e-3}, SsimParams{}, c);
    EXPECT_EQ(r.trajectory.size(), 301u);
    EXPECT_NEAR(ssim(phasor_energy(basis, r.best_gains), target_energy(basis, r.target)), r.best_ssim, 1e-12);
    for (std::size_t k = 1; k < r.trajectory.size(); ++k)
        EXPECT_GE(r.trajectory[k].best_ssim, r.trajectory[k - 1].best_ssim);
    EXPECT_EQ(anneal(basis, cache, {25e-3, 60e-3}, SsimParams{}, c).best_gains, r.best_gains);
}

TEST_F(AnnealFixture, LiteralRuleRuns) {
    AnnealConfig c = cfg;
    c.accept_rule = AcceptRule::literal;
    const DecoupleResult r = anneal(basis, cache, {25e-3, 60e-3}, SsimParams{}, c);
    for (std::size_t k = 1; k < r.trajectory.size(); ++k)
        EXPECT_GE(r.trajectory[k].best_ssim, r.trajectory[k - 1].best_ssim);
}

TEST_F(AnnealFixture, RejectsBadInputs) {
    auto kind = [&](Point p, AnnealConfig c) {
        try {
            anneal(basis, cache, p, SsimParams{}, c);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::Io;
    };
    EXPECT_EQ(kind({0.0, 0.05}, cfg), ErrorKind::OutOfDomain);
    EXPECT_EQ(kind({0.02, 0.2}, cfg), ErrorKind::OutOfDomain);
    AnnealConfig c = cfg;
    c.iterations = 0;
    EXPECT_EQ(kind({0.02, 0.05}, c), ErrorKind::Config);
    const PlateSpec other = oracle::small_plate(20, 40);
    const ResponseCache wrong(build_modal_basis(other, ActuatorLayout::quincunx(other), 160.0, 50.0));
    EXPECT_THROW(anneal(basis, wrong, {0.02, 0.05}, SsimParams{}, cfg), Error);
}

// One step evaluates the 5-field phasor sum and one filtered SSIM pass, so
// its cost should grow in proportion to the pixel count.
TEST(AnnealStep, CostScalesLinearlyWithPixels) {
    auto step_seconds = [](int nx, int ny) {
        const PlateSpec s = oracle::small_plate(nx, ny);
        const ModalBasis b = build_modal_basis(s, ActuatorLayout::quincunx(s), 160.0, 50.0);
        const ResponseCache cache(b);
        DecoupleObjective objective(cache, target_energy(b, {20e-3, 50e-3}), SsimParams{});
        Rng rng(1);
        const GainSpectrum g = random_gains(rng);
        objective.score(g);
        double best = 1e9;
        for (int rep = 0; rep < 5; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            for (int k = 0; k < 20; ++k) objective.score(g);
            best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        }
        return best / 20.0;
    };
    const double small = step_seconds(90, 184);
    const double large = step_seconds(179, 367);
    const double ratio = large / small;
    const double pixel_ratio = (179.0 * 367.0) / (90.0 * 184.0);
    EXPECT_GT(ratio, pixel_ratio / 2.5);
    EXPECT_LT(ratio, pixel_ratio * 2.5);
}

}  // namespace
}  // namespace platefocus
