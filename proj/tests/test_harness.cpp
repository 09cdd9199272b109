#include "coreset/harness/dataset_io.hpp"
#include "coreset/harness/experiment.hpp"
#include "coreset/harness/report.hpp"
#include "coreset/harness/synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace coreset::harness {
namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("coreset_test_" + name)).string();
}

FeatureSet small_data() {
    return generate_synthetic({3, 7, 4, 0.8, 12}).features;
}

TEST(Synthetic, CountsAndLabels) {
    const auto data = generate_synthetic({2, 5, 2, 1.0, 0});
    EXPECT_EQ(data.features.size(), 10u);
    std::size_t ones = 0;
    for (Label y : data.features.labels()) ones += y;
    EXPECT_EQ(ones, 5u);
}

TEST(Synthetic, ZeroSpreadCollapsesToMeans) {
    const auto data = generate_synthetic({3, 4, 3, 0.0, 9});
    const auto& fs = data.features;
    for (Index i = 0; i < fs.size(); ++i)
        for (std::size_t k = 0; k < 3; ++k)
            EXPECT_EQ(fs.row(i)[k], static_cast<float>(data.means[fs.labels()[i]][k]));
}

TEST(Synthetic, SampleMeansNearConfiguredMeans) {
    const double sigma = 0.7;
    const std::size_t per = 400;
    const auto data = generate_synthetic({4, per, 3, sigma, 21});
    const auto& fs = data.features;
    std::vector<std::vector<double>> sum(4, std::vector<double>(3, 0.0));
    for (Index i = 0; i < fs.size(); ++i)
        for (std::size_t k = 0; k < 3; ++k) sum[fs.labels()[i]][k] += fs.row(i)[k];
    for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t k = 0; k < 3; ++k)
            EXPECT_NEAR(sum[c][k] / per, data.means[c][k], 4 * sigma / std::sqrt(static_cast<double>(per)));
}

TEST(Synthetic, RejectsNonpositiveCounts) {
    EXPECT_THROW(generate_synthetic({0, 5, 2, 1.0, 0}), Error);
    EXPECT_THROW(generate_synthetic({2, 0, 2, 1.0, 0}), Error);
}

TEST(DatasetIo, BinaryRoundTrip) {
    const auto fs = small_data();
    const auto path = temp_path("rt.bin");
    save_dataset(path, fs);
    EXPECT_EQ(load_dataset(path), fs);
    std::remove(path.c_str());
}

TEST(DatasetIo, BinaryLayout) {
    const FeatureSet fs(1, 2, {1.0f, -2.0f}, std::vector<Label>{1}, 3);
    const auto bytes = encode_binary(fs);
    ASSERT_EQ(bytes.size(), 24u + 8u + 4u);
    EXPECT_EQ(bytes.substr(0, 4), "CSAL");
    EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1);  // version, little-endian
    EXPECT_EQ(static_cast<unsigned char>(bytes[16]), 3);  // C
    EXPECT_EQ(static_cast<unsigned char>(bytes[20]), 1);  // has_labels
    EXPECT_EQ(static_cast<unsigned char>(bytes[27]), 0x3f);  // 1.0f = 0x3f800000
}

TEST(DatasetIo, UnlabeledRoundTrip) {
    const FeatureSet fs(2, 1, {0.5f, 1.5f}, std::nullopt, 0);
    EXPECT_EQ(decode_binary(encode_binary(fs)), fs);
    EXPECT_EQ(decode_csv(encode_csv(fs)), fs);
}

TEST(DatasetIo, CsvMatchesBinary) {
    const auto fs = small_data();
    const auto csv = temp_path("same.csv"), bin = temp_path("same.bin");
    save_dataset(csv, fs);
    save_dataset(bin, fs);
    EXPECT_EQ(load_dataset(csv), load_dataset(bin));
    EXPECT_EQ(load_dataset(csv), fs);
    std::remove(csv.c_str());
    std::remove(bin.c_str());
}

void expect_format_error(const std::string& bytes) {
    try {
        decode_binary(bytes);
        FAIL() << "expected a format error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kFormat) << e.what();
    }
}

TEST(DatasetIo, StructuredFormatErrors) {
    const auto bytes = encode_binary(small_data());
    expect_format_error(bytes.substr(0, bytes.size() - 3));
    expect_format_error(bytes.substr(0, 10));
    expect_format_error("XXXX" + bytes.substr(4));
    expect_format_error(bytes + "z");

    auto bad_label = encode_binary(FeatureSet(1, 1, {0.0f}, std::vector<Label>{1}, 2));
    bad_label[bad_label.size() - 4] = 5;
    expect_format_error(bad_label);

    auto nan = encode_binary(FeatureSet(1, 1, {0.0f}, std::nullopt, 0));
    const auto q = std::bit_cast<std::uint32_t>(std::numeric_limits<float>::quiet_NaN());
    for (int k = 0; k < 4; ++k) nan[24 + k] = static_cast<char>((q >> (8 * k)) & 0xff);
    expect_format_error(nan);
}

TEST(DatasetIo, CsvErrors) {
    EXPECT_THROW(decode_csv("f0,label\n1.0\n"), Error);
    EXPECT_THROW(decode_csv("f1,label\n1.0,0\n"), Error);
    EXPECT_THROW(decode_csv("f0,label\nabc,0\n"), Error);
    EXPECT_THROW(decode_csv("f0,label\ninf,0\n"), Error);
    EXPECT_EQ(decode_csv("f0,label\r\n1.5,2\r\n").num_classes(), 3u);
}

TEST(DatasetIo, MissingFileIsIoError) {
    try {
        load_dataset(temp_path("does_not_exist.bin"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kIo);
    }
}

ExperimentConfig quick_config(Strategy s) {
    ExperimentConfig cfg;
    cfg.strategy = s;
    cfg.initial = 10;
    cfg.budget = 10;
    cfg.rounds = 3;
    cfg.seeds = {0, 1};
    cfg.learner.epochs = 50;
    return cfg;
}

TEST(Experiment, RandomOneRoundBookkeeping) {
    const auto data = generate_synthetic({3, 40, 2, 0.5, 1}).features;
    auto cfg = quick_config(Strategy::kRandom);
    cfg.rounds = 1;
    cfg.seeds = {7};
    const auto curve = run_experiment(data, cfg);
    ASSERT_EQ(curve.rows.size(), 2u);
    EXPECT_EQ(curve.rows[0].labeled, 10u);
    EXPECT_EQ(curve.rows[1].labeled, 20u);
    EXPECT_EQ(curve.rows[1].round, 1u);
    EXPECT_GE(curve.rows[1].accuracy, 0.0);
    EXPECT_LE(curve.rows[1].accuracy, 1.0);
}

TEST(Experiment, EveryStrategyGrowsByBudget) {
    const auto data = generate_synthetic({3, 40, 2, 0.5, 2}).features;
    for (auto s : {Strategy::kRandom, Strategy::kEntropy, Strategy::kOracle, Strategy::kKMedoids,
                   Strategy::kCoresetGreedy, Strategy::kCoresetRobust}) {
        const auto curve = run_experiment(data, quick_config(s));
        ASSERT_EQ(curve.rows.size(), 8u) << to_string(s);
        for (const auto& r : curve.rows) EXPECT_EQ(r.labeled, 10 + 10 * r.round) << to_string(s);
        EXPECT_EQ(encode_curve_csv(curve), encode_curve_csv(run_experiment(data, quick_config(s)))) << to_string(s);
    }
}

TEST(Experiment, CoresetRadiusNonIncreasing) {
    const auto data = generate_synthetic({4, 50, 3, 1.0, 3}).features;
    const auto curve = run_experiment(data, quick_config(Strategy::kCoresetGreedy));
    for (std::size_t k = 1; k < curve.rows.size(); ++k)
        if (curve.rows[k].seed == curve.rows[k - 1].seed)
            EXPECT_LE(curve.rows[k].cover_radius, curve.rows[k - 1].cover_radius);
}

TEST(Experiment, PoolExhaustionStopsEarly) {
    const auto data = generate_synthetic({2, 10, 2, 0.5, 4}).features;  // pool of 16
    auto cfg = quick_config(Strategy::kRandom);
    cfg.initial = 6;
    cfg.budget = 4;
    cfg.rounds = 5;
    cfg.seeds = {0};
    const auto curve = run_experiment(data, cfg);
    EXPECT_EQ(curve.rows.back().labeled, 14u);
    EXPECT_EQ(curve.rows.size(), 3u);
    EXPECT_FALSE(curve.notes.empty());
}

TEST(Experiment, HoldoutIsTrailingFifth) {
    const auto data = generate_synthetic({2, 25, 2, 0.5, 5}).features;
    const auto split = holdout_split(data, 0.2);
    EXPECT_EQ(split.pool.size(), 40u);
    EXPECT_EQ(split.test.size(), 10u);
    EXPECT_EQ(split.test.row(0)[0], data.row(40)[0]);
}

TEST(Report, CurveCsvRoundTrip) {
    const auto data = generate_synthetic({3, 40, 2, 0.5, 6}).features;
    const auto curve = run_experiment(data, quick_config(Strategy::kCoresetGreedy));
    const auto text = encode_curve_csv(curve);
    EXPECT_EQ(text.substr(0, text.find('\n')), kCurveHeader);
    EXPECT_EQ(encode_curve_csv(decode_curve_csv(text)), text);
}

TEST(Report, SingleSeedHasZeroSpread) {
    LearningCurve c;
    c.rows = {{0, 0, 10, 0.4}, {0, 1, 20, 0.6}};
    for (const auto& p : summarize(c, "x").points) EXPECT_EQ(p.stddev, 0.0);
}

TEST(Report, ConstantAccuracyAcrossSeeds) {
    LearningCurve c;
    for (std::uint64_t s = 0; s < 5; ++s) c.rows.push_back({s, 0, 10, 0.5});
    const auto series = summarize(c, "x");
    ASSERT_EQ(series.points.size(), 1u);
    EXPECT_DOUBLE_EQ(series.points[0].mean, 0.5);
    EXPECT_DOUBLE_EQ(series.points[0].stddev, 0.0);
}

TEST(Report, PopulationStddev) {
    LearningCurve c;
    const double acc[5] = {0.2, 0.4, 0.4, 0.6, 0.9};
    for (std::uint64_t s = 0; s < 5; ++s) c.rows.push_back({s, 0, 10, acc[s]});
    const double m = (0.2 + 0.4 + 0.4 + 0.6 + 0.9) / 5;
    double ss = 0;
    for (double a : acc) ss += (a - m) * (a - m);
    const auto p = summarize(c, "x").points[0];
    EXPECT_NEAR(p.mean, m, 1e-15);
    EXPECT_NEAR(p.stddev, std::sqrt(ss / 5), 1e-15);
}

TEST(Report, PlotFiles) {
    LearningCurve c;
    c.rows = {{0, 0, 10, 0.4}, {1, 0, 10, 0.5}, {0, 1, 20, 0.6}, {1, 1, 20, 0.8}};
    const std::vector<Series> series{summarize(c, "a<b")};
    const auto prefix = temp_path("plot");
    emit_plot_data(series, prefix);
    std::ifstream dat(prefix + ".dat"), svg(prefix + ".svg");
    std::string header, comment, first;
    std::getline(dat, header);
    std::getline(dat, comment);
    std::getline(dat, first);
    EXPECT_EQ(header, "# a<b");
    std::istringstream row(first);
    double x = 0, m = 0, sd = 0;
    row >> x >> m >> sd;
    EXPECT_EQ(x, 10.0);
    EXPECT_NEAR(m, 0.45, 1e-15);
    EXPECT_NEAR(sd, 0.05, 1e-15);
    std::string svg_text((std::istreambuf_iterator<char>(svg)), std::istreambuf_iterator<char>());
    EXPECT_NE(svg_text.find("<svg"), std::string::npos);
    EXPECT_NE(svg_text.find("a&lt;b"), std::string::npos);
    std::remove((prefix + ".dat").c_str());
    std::remove((prefix + ".svg").c_str());
}

}  // namespace
}  // namespace coreset::harness
