#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pupilcover/coverage.hpp"

using namespace pupilcover;

namespace {

const PupilConfig two_pupils{{{{0, 0}, 0.3}, {{1, 0}, 0.2}}, 1.0};

PupilConfig single(double r, double R = 1.0) { return {{{{0, 0}, r}}, R}; }

PupilConfig grown(PupilConfig cfg, double by) {
    for (auto& p : cfg.pupils) p.radius = std::max(0.0, p.radius + by);
    return cfg;
}

bool certified_uncovered(const PupilConfig& cfg, const std::optional<Point>& w) {
    return w && norm(*w) <= cfg.objective_radius + 1e-9 && oracle::brute_delta_min(cfg, *w) > 0.0;
}

} // namespace

TEST(Decide, SinglePupil) {
    EXPECT_TRUE(decide(single(0.5)).covered);
    const Decision d = decide(single(0.3));
    ASSERT_FALSE(d.covered);
    ASSERT_TRUE(d.witness);
    EXPECT_NEAR(norm(*d.witness), 1.0, 1e-12);
}

TEST(Decide, TwoPupilExampleWitnessAboveOrBelow) {
    const Decision d = decide(two_pupils);
    ASSERT_FALSE(d.covered);
    ASSERT_TRUE(certified_uncovered(two_pupils, d.witness));
    // The deepest uncovered points form an arc of the objective circle through
    // (0, +-1), all at distance 0.4 from the ACS.
    EXPECT_NEAR(norm(*d.witness), 1.0, 1e-9);
    EXPECT_NEAR(oracle::brute_delta_min(two_pupils, *d.witness), 0.4, 1e-9);
    EXPECT_NEAR(oracle::brute_delta_min(two_pupils, {0, 1}), 0.4, 1e-12);
    EXPECT_FALSE(coverage_oracle(two_pupils, 256).covered);
}

TEST(Oracle, SinglePupil) {
    EXPECT_TRUE(coverage_oracle(single(0.5), 256).covered);
    const Decision d = coverage_oracle(single(0.3), 256);
    ASSERT_FALSE(d.covered);
    EXPECT_GT(norm(*d.witness), 0.6);
}

// Coverage-heavy distribution: larger radii and tighter centers than the acceptance suite.
TEST(Decide, AgreesWithGridOracle) {
    std::mt19937_64 rng(31);
    const int res = 512;
    const double h = 2.0 / res;
    int covered = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const auto cfg = oracle::random_config(rng, 2 + trial % 4, 1.0, 0.15, 0.45, 0.6);
        const Decision d = decide(cfg);
        const Decision o = coverage_oracle(cfg, res);
        covered += d.covered;
        if (d.covered) {
            EXPECT_TRUE(o.covered) << "trial " << trial;
            continue;
        }
        ASSERT_TRUE(certified_uncovered(cfg, d.witness)) << "trial " << trial;
        if (o.covered) {
            EXPECT_TRUE(norm(*d.witness) > 1.0 - 2 * h || oracle::brute_delta_min(cfg, *d.witness) < h)
                << "trial " << trial;
        }
    }
    EXPECT_GT(covered, 20);
}

TEST(AlphaStar, SinglePupilClosedForm) {
    EXPECT_DOUBLE_EQ(alpha_star(single(0.3)), 0.4);
    EXPECT_DOUBLE_EQ(alpha_star(single(0.5)), 0.0);
    EXPECT_DOUBLE_EQ(alpha_star(single(0.7)), -0.4);
}

TEST(AlphaStar, TwoPupilExampleIsTight) {
    const double v = alpha_star(two_pupils);
    EXPECT_NEAR(v, 0.4, 1e-9);
    EXPECT_TRUE(coverage_oracle(grown(two_pupils, v / 2 + 1e-9), 512).covered);
    const auto under = grown(two_pupils, (v - 1e-6) / 2);
    EXPECT_TRUE(certified_uncovered(under, decide(under).witness));
    EXPECT_LE(oracle::sampled_alpha(two_pupils, 200, 720), v + 1e-12);
}

TEST(AlphaStar, UpperBoundsEverySampledDepth) {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 40; ++trial) {
        const auto cfg = oracle::random_config(rng, 1 + trial % 5, 1.0, 0.0, 0.5, 1.0);
        const double a = alpha_star(cfg);
        const double sampled = oracle::sampled_alpha(cfg, 60, 360);
        EXPECT_GE(a, sampled - 1e-9);
        EXPECT_LE(a, sampled + 2.0 * std::numbers::pi / 360 + 1.0 / 60);
    }
}

TEST(PerDiskAlpha, Examples) {
    const AlphaTable single_table = per_disk_alpha(single(0.3));
    ASSERT_TRUE(single_table.at(0, 0));
    EXPECT_DOUBLE_EQ(*single_table.at(0, 0), 0.4);

    std::mt19937_64 rng(33);
    int seen = 0;
    while (seen < 10) {
        const auto cfg = oracle::random_config(rng, 4, 1.0, 0.2, 0.5, 0.6);
        if (!decide(cfg).covered) continue;
        ++seen;
        const AlphaTable t = per_disk_alpha(cfg);
        EXPECT_LE(t.max(), 1e-9);
    }
}

// Enlarging each raw disk by its own clamped alpha must cover the objective.
TEST(PerDiskAlpha, IndividualEnlargementCovers) {
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi), rad(0, 1);
    for (int trial = 0; trial < 30; ++trial) {
        const auto cfg = oracle::random_config(rng, 1 + trial % 5, 1.0, 0.0, 0.5, 1.0);
        const AlphaTable t = per_disk_alpha(cfg);
        std::vector<Disk> disks;
        for (std::size_t i = 0; i < cfg.size(); ++i)
            for (std::size_t j = 0; j < cfg.size(); ++j) {
                Disk d = minkowski_diff(cfg.pupils[i], cfg.pupils[j]);
                if (t.at(i, j)) d.radius += std::max(0.0, *t.at(i, j));
                disks.push_back(d);
            }
        for (int k = 0; k < 4000; ++k) {
            const double r = std::sqrt(rad(rng)), th = ang(rng);
            const Point x{r * std::cos(th), r * std::sin(th)};
            EXPECT_LE(delta_min(std::span<const Disk>(disks), x).value, 1e-9);
        }
    }
}

TEST(MaxObjective, Examples) {
    EXPECT_DOUBLE_EQ(max_objective(single(0.4)), 0.8);
    EXPECT_NEAR(max_objective(two_pupils), 0.6, 1e-12);
    EXPECT_NEAR(oracle::bisect_max_objective(two_pupils), 0.6, 1e-6);
    try {
        max_objective({{{{0, 0}, 0}, {{1, 0}, 0}}, 1.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::no_coverage);
    }
}

TEST(MaxObjective, DecideFlipsAroundIt) {
    std::mt19937_64 rng(35);
    for (int trial = 0; trial < 20; ++trial) {
        const auto cfg = oracle::random_config(rng, 1 + trial % 5, 1.0, 0.05, 0.5, 1.0);
        const double r = max_objective(cfg);
        EXPECT_TRUE(decide(oracle::with_objective(cfg, r - 1e-4)).covered);
        EXPECT_FALSE(decide(oracle::with_objective(cfg, r + 1e-4)).covered);
    }
}

TEST(CoverageReport, CollectsEverything) {
    const CoverageReport r = coverage_report(two_pupils);
    EXPECT_FALSE(r.covered);
    EXPECT_NEAR(r.alpha_star, 0.4, 1e-9);
    ASSERT_TRUE(r.r_star);
    EXPECT_NEAR(*r.r_star, 0.6, 1e-12);
    EXPECT_NEAR(r.per_disk_alpha.max(), r.alpha_star, 1e-12);
}
