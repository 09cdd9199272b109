#include "coreset/geometry.hpp"
#include "support/brute_force.hpp"

#include <gtest/gtest.h>

#include <random>

namespace coreset {
namespace {

using testing::line;

TEST(Distance, ScalarAndTriangle) {
    const auto fs = line({0.0f, 4.0f});
    DistanceOracle oracle(fs);
    EXPECT_DOUBLE_EQ(oracle.distance(0, 1), 4.0);
    EXPECT_DOUBLE_EQ(oracle.distance(1, 1), 0.0);

    FeatureSet tri(2, 2, {3.0f, 0.0f, 0.0f, 4.0f}, std::nullopt, 0);
    DistanceOracle t(tri);
    EXPECT_DOUBLE_EQ(t.distance(0, 1), 5.0);
    EXPECT_DOUBLE_EQ(t.distance(1, 0), 5.0);
}

TEST(Distance, OutOfRangeThrows) {
    const auto fs = line({0.0f, 1.0f});
    DistanceOracle oracle(fs);
    EXPECT_THROW(oracle.distance(0, 2), Error);
    EXPECT_THROW(oracle.add_center(5), Error);
}

TEST(Distance, CachedAndOnDemandBitwiseEqual) {
    std::mt19937_64 rng(7);
    const auto fs = testing::random_points(rng, 40, 5);
    DistanceOracle cached(fs);
    DistanceOracle lazy(fs, {.cache_threshold = 0});
    ASSERT_TRUE(cached.cached());
    ASSERT_FALSE(lazy.cached());
    for (Index i = 0; i < fs.size(); ++i) {
        for (Index j = 0; j < fs.size(); ++j) {
            EXPECT_EQ(cached.distance(i, j), lazy.distance(i, j));
            EXPECT_EQ(cached.distance(i, j), cached.distance(j, i));
        }
    }
}

TEST(Distance, DuplicatePointsHaveZeroDistance) {
    const auto fs = line({2.0f, 2.0f, 3.0f});
    DistanceOracle oracle(fs);
    EXPECT_EQ(oracle.distance(0, 1), 0.0);
}

TEST(AddCenter, LineExample) {
    const auto fs = line({0, 1, 2, 3, 4});
    DistanceOracle oracle(fs);
    oracle.add_center(0);
    EXPECT_EQ(std::vector<double>(oracle.min_dist().begin(), oracle.min_dist().end()),
              (std::vector<double>{0, 1, 2, 3, 4}));
    oracle.add_center(4);
    const std::vector<double> after{0, 1, 2, 1, 0};
    EXPECT_EQ(std::vector<double>(oracle.min_dist().begin(), oracle.min_dist().end()), after);
    oracle.add_center(4);
    EXPECT_EQ(std::vector<double>(oracle.min_dist().begin(), oracle.min_dist().end()), after);
}

TEST(AddCenter, MatchesRecomputationFromScratch) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto fs = testing::random_points(rng, 30, 3);
        DistanceOracle oracle(fs, {.cache_threshold = trial % 2 == 0 ? 8192u : 0u});
        std::uniform_int_distribution<Index> pick(0, fs.size() - 1);
        std::vector<Index> centers;
        for (int k = 0; k < 6; ++k) {
            centers.push_back(pick(rng));
            oracle.add_center(centers.back());
            for (Index i = 0; i < fs.size(); ++i) {
                double best = std::numeric_limits<double>::infinity();
                for (Index c : centers) best = std::min(best, testing::ref_distance(fs, i, c));
                ASSERT_EQ(oracle.min_dist()[i], best);
            }
            for (Index c : centers) ASSERT_EQ(oracle.min_dist()[c], 0.0);
        }
    }
}

TEST(CoverRadius, LineExamples) {
    const auto fs = line({0, 1, 2, 3, 4});
    DistanceOracle oracle(fs);
    const std::vector<Index> ends{0, 4};
    EXPECT_DOUBLE_EQ(cover_radius(oracle, ends), 2.0);
    const std::vector<Index> all{0, 1, 2, 3, 4};
    EXPECT_DOUBLE_EQ(cover_radius(oracle, all), 0.0);
    EXPECT_THROW(cover_radius(oracle, std::vector<Index>{}), Error);
}

TEST(CoverRadius, MatchesBruteForceAndShrinksWithMoreCenters) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto fs = testing::random_points(rng, 10, 2);
        DistanceOracle oracle(fs);
        std::vector<Index> centers;
        double previous = std::numeric_limits<double>::infinity();
        for (Index c : {3u, 7u, 0u, 9u}) {
            centers.push_back(c);
            double expected = 0.0;
            for (Index i = 0; i < fs.size(); ++i) {
                double best = std::numeric_limits<double>::infinity();
                for (Index j : centers) best = std::min(best, testing::ref_distance(fs, i, j));
                expected = std::max(expected, best);
            }
            const double r = cover_radius(oracle, centers);
            EXPECT_EQ(r, expected);
            EXPECT_LE(r, previous);
            previous = r;
        }
    }
}

TEST(FeatureSet, RejectsBadInput) {
    EXPECT_THROW(FeatureSet(0, 1, {}, std::nullopt, 0), Error);
    EXPECT_THROW(FeatureSet(1, 1, {std::numeric_limits<float>::quiet_NaN()}, std::nullopt, 0), Error);
    EXPECT_THROW(FeatureSet(2, 1, {0.0f, 1.0f}, std::vector<Label>{0, 2}, 2), Error);
    EXPECT_THROW(FeatureSet(2, 2, {0.0f, 1.0f}, std::nullopt, 0), Error);
}

TEST(FeatureSet, StandardizeGivesZeroMeanUnitVariance) {
    FeatureSet fs(4, 2, {1, 5, 2, 5, 3, 5, 4, 5}, std::nullopt, 0);
    const auto z = standardize(fs);
    double mean = 0.0, sq = 0.0;
    for (Index i = 0; i < 4; ++i) {
        mean += z.row(i)[0];
        sq += z.row(i)[0] * z.row(i)[0];
        EXPECT_EQ(z.row(i)[1], 0.0f);
    }
    EXPECT_NEAR(mean, 0.0, 1e-6);
    EXPECT_NEAR(sq / 4.0, 1.0, 1e-6);
}

}  // namespace
}  // namespace coreset
