#include "coreset/learner.hpp"
#include "support/gradcheck.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace coreset {
namespace {

FeatureSet two_clusters() {
    std::vector<float> x;
    std::vector<Label> y;
    for (int k = 0; k < 10; ++k) {
        x.push_back(-5.0f + 0.1f * k);
        y.push_back(0);
        x.push_back(4.0f + 0.1f * k);
        y.push_back(1);
    }
    return FeatureSet(20, 1, std::move(x), std::move(y), 2);
}

TEST(Learner, SeparableClustersFitPerfectly) {
    const auto fs = two_clusters();
    const auto model = fit(fs);
    EXPECT_DOUBLE_EQ(accuracy(model, fs), 1.0);
}

TEST(Learner, ZeroEpochsGivesUniformProbabilities) {
    const auto fs = two_clusters();
    LearnerParams params;
    params.epochs = 0;
    const auto model = fit(fs, params);
    for (double w : model.weights().data) EXPECT_EQ(w, 0.0);
    const auto p = predict_proba(model, fs);
    for (double v : p.data) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(Learner, FitIsDeterministic) {
    const auto fs = two_clusters();
    EXPECT_EQ(fit(fs), fit(fs));
}

TEST(Learner, ZeroModelFourClasses) {
    SoftmaxModel model(4, 3);
    const FeatureSet fs(2, 3, {1, 2, 3, -1, 0, 5}, std::nullopt, 0);
    const auto p = predict_proba(model, fs);
    for (double v : p.data) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(Learner, LargeLogitsDoNotOverflow) {
    std::vector<double> z{1000.0, 0.0};
    softmax_inplace(z);
    EXPECT_DOUBLE_EQ(z[0], 1.0);
    EXPECT_GE(z[1], 0.0);
    EXPECT_LT(z[1], 1e-300);
    EXPECT_TRUE(std::isfinite(z[1]));
}

TEST(Learner, RowsSumToOne) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 3.0);
    SoftmaxModel model(7, 4);
    for (auto& w : model.weights().data) w = g(rng);
    for (auto& b : model.bias()) b = g(rng);
    std::vector<float> v(50 * 4);
    for (auto& x : v) x = static_cast<float>(g(rng));
    const FeatureSet fs(50, 4, std::move(v), std::nullopt, 0);
    const auto p = predict_proba(model, fs);
    for (std::size_t i = 0; i < p.rows; ++i) {
        double s = 0.0;
        for (double x : p.row(i)) {
            EXPECT_GE(x, 0.0);
            s += x;
        }
        EXPECT_NEAR(s, 1.0, 1e-9);
    }
}

TEST(Learner, DimensionMismatchThrows) {
    SoftmaxModel model(2, 3);
    const FeatureSet fs(1, 2, {1, 2}, std::nullopt, 0);
    EXPECT_THROW(predict_proba(model, fs), Error);
}

TEST(Learner, LossClosedForms) {
    const std::vector<Label> y{3};
    Matrix onehot(1, 10, 0.0);
    onehot(0, 3) = 1.0;
    EXPECT_DOUBLE_EQ(point_losses(onehot, y, LossKind::kL2).values[0], 0.0);
    EXPECT_DOUBLE_EQ(point_losses(onehot, y, LossKind::kCrossEntropy).values[0], 0.0);

    const Matrix uniform(1, 10, 0.1);
    EXPECT_NEAR(point_losses(uniform, y, LossKind::kL2).values[0], std::sqrt(0.9), 1e-12);
    EXPECT_NEAR(point_losses(uniform, y, LossKind::kCrossEntropy).values[0], std::log(10.0), 1e-12);
    EXPECT_DOUBLE_EQ(point_losses(uniform, y, LossKind::kL2).bound, std::sqrt(2.0));
}

TEST(Learner, CrossEntropyClampsZeroProbability) {
    Matrix p(1, 2, 0.0);
    p(0, 0) = 1.0;
    const std::vector<Label> y{1};
    EXPECT_NEAR(point_losses(p, y, LossKind::kCrossEntropy).values[0], -std::log(1e-12), 1e-9);
}

TEST(Learner, MissingLabelsThrow) {
    SoftmaxModel model(2, 1);
    const FeatureSet fs(1, 1, {1}, std::nullopt, 0);
    EXPECT_THROW(point_losses(model, fs, LossKind::kL2), Error);
    EXPECT_THROW(accuracy(model, fs), Error);
}

TEST(Learner, L2LossesNeverExceedSqrtTwo) {
    std::mt19937_64 rng(11);
    std::gamma_distribution<double> g(0.2, 1.0);
    std::uniform_int_distribution<Label> pick(0, 4);
    Matrix p(2000, 5);
    std::vector<Label> y(2000);
    for (std::size_t i = 0; i < p.rows; ++i) {
        double s = 0.0;
        for (auto& v : p.row(i)) s += (v = g(rng));
        for (auto& v : p.row(i)) v /= s;
        y[i] = pick(rng);
    }
    for (double l : point_losses(p, y, LossKind::kL2).values) EXPECT_LE(l, std::sqrt(2.0) + 1e-12);
}

TEST(Learner, AccuracyTieRuleAndBalancedLabels) {
    SoftmaxModel model(2, 1);
    const FeatureSet fs(4, 1, {1, 2, 3, 4}, std::vector<Label>{0, 1, 0, 1}, 2);
    EXPECT_DOUBLE_EQ(accuracy(model, fs), 0.5);
}

TEST(Learner, AccuracyMatchesRecount) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g(0.0, 1.0);
    SoftmaxModel model(3, 2);
    for (auto& w : model.weights().data) w = g(rng);
    std::vector<float> v(60 * 2);
    for (auto& x : v) x = static_cast<float>(g(rng));
    std::vector<Label> y(60);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<Label>((i * 7) % 3);
    const FeatureSet fs(60, 2, v, y, 3);

    std::size_t hits = 0;
    for (std::size_t i = 0; i < 60; ++i) {
        double best = -1e300;
        Label arg = 0;
        for (Label c = 0; c < 3; ++c) {
            const double z = model.weights()(c, 0) * v[2 * i] + model.weights()(c, 1) * v[2 * i + 1];
            if (z > best) {
                best = z;
                arg = c;
            }
        }
        hits += arg == y[i];
    }
    EXPECT_DOUBLE_EQ(accuracy(model, fs), static_cast<double>(hits) / 60.0);
}

TEST(Learner, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = testing::random_gradient_instance(rng);
        EXPECT_LE(testing::check_gradient(inst.model, inst.data).relative_error, 1e-5) << "trial " << trial;
    }
}

TEST(Learner, TrainingObjectiveNonIncreasing) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<float> v(80 * 3);
    std::vector<Label> y(80);
    for (std::size_t i = 0; i < 80; ++i) {
        y[i] = static_cast<Label>(i % 4);
        for (std::size_t k = 0; k < 3; ++k) v[3 * i + k] = static_cast<float>(g(rng) + (k == y[i] % 3 ? 2.0 : 0.0));
    }
    const FeatureSet fs(80, 3, std::move(v), std::move(y), 4);
    std::vector<double> history;
    fit(fs, {}, &history);
    ASSERT_EQ(history.size(), 501u);
    for (std::size_t k = 1; k < history.size(); ++k) EXPECT_LE(history[k], history[k - 1] + 1e-12);
}

TEST(Learner, LogitEmbeddingShape) {
    const auto fs = two_clusters();
    const auto model = fit(fs);
    const auto emb = logit_embedding(model, fs);
    EXPECT_EQ(emb.size(), fs.size());
    EXPECT_EQ(emb.dim(), 2u);
    EXPECT_TRUE(emb.has_labels());
}

}  // namespace
}  // namespace coreset
