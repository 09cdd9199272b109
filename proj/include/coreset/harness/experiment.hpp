#pragma once

#include "coreset/error.hpp"
#include "coreset/geometry.hpp"
#include "coreset/learner.hpp"
#include "coreset/pool.hpp"
#include "coreset/strategies.hpp"
#include "coreset/theory.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace coreset::harness {

enum class Embedding { kRaw, kLogits };

struct ExperimentConfig {
    Strategy strategy = Strategy::kRandom;
    std::size_t initial = 100;  // m
    std::size_t budget = 100;   // b per round
    std::size_t rounds = 5;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    double xi_frac = 1e-4;  // outlier cap = floor(xi_frac * |unlabeled|)
    LearnerParams learner;
    double time_limit_s = 30.0;  // per feasibility probe
    double test_fraction = 0.2;  // trailing rows held out
    Embedding embedding = Embedding::kRaw;
    bool record_time = false;  // wall_ms stays 0 otherwise, keeping output reproducible
    OracleOptions oracle;
};

struct CurveRow {
    std::uint64_t seed = 0;
    std::size_t round = 0;
    std::size_t labeled = 0;
    double accuracy = 0.0;
    double cover_radius = 0.0;
    double coreset_loss = 0.0;
    double train_loss = 0.0;
    double wall_ms = 0.0;
};

struct LearningCurve {
    std::vector<CurveRow> rows;  // sorted by (seed, round)
    std::vector<std::string> notes;  // early stops, solver fallbacks
};

struct Split {
    FeatureSet pool;
    FeatureSet test;
};

inline Split holdout_split(const FeatureSet& data, double test_fraction) {
    require(test_fraction > 0.0 && test_fraction < 1.0, ErrorCode::kInvalidArgument,
            "test fraction must be in (0, 1)");
    const std::size_t n = data.size();
    const auto n_test = static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(n)));
    require(n_test >= 1 && n_test < n, ErrorCode::kInvalidArgument, "dataset too small for a holdout split");
    std::vector<Index> pool(n - n_test), test(n_test);
    std::iota(pool.begin(), pool.end(), Index{0});
    std::iota(test.begin(), test.end(), n - n_test);
    return {data.subset(pool), data.subset(test)};
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

inline std::size_t outlier_cap(double xi_frac, std::size_t unlabeled) {
    return static_cast<std::size_t>(std::floor(xi_frac * static_cast<double>(unlabeled)));
}

// Pool-based active learning: for every seed, draw the initial set uniformly
// from the pool, then alternate fitting the learner, recording metrics on the
// held-out rows, and acquiring `budget` new labels with the configured
// strategy. Row k reflects the labels available after k acquisitions.
inline LearningCurve run_experiment(const FeatureSet& data, const ExperimentConfig& cfg) {
    require(data.has_labels(), ErrorCode::kInvalidArgument, "experiment needs a labeled dataset");
    require(cfg.initial >= 1 && cfg.budget >= 1 && cfg.rounds >= 1, ErrorCode::kInvalidArgument,
            "initial, budget and rounds must be >= 1");
    require(!cfg.seeds.empty(), ErrorCode::kInvalidArgument, "seed list is empty");
    require(cfg.xi_frac >= 0.0, ErrorCode::kInvalidArgument, "xi fraction must be >= 0");

    const auto split = holdout_split(data, cfg.test_fraction);
    const FeatureSet& pool_fs = split.pool;
    require(cfg.initial <= pool_fs.size(), ErrorCode::kInvalidArgument, "initial set larger than the pool");
    const auto pool_labels = pool_fs.labels();
    const DistanceOracle raw_oracle(pool_fs, cfg.oracle);

    LearningCurve curve;
    for (const auto seed : cfg.seeds) {
        PoolState pool(pool_fs.size(), select_random(PoolState(pool_fs.size(), {}), cfg.initial, seed));
        for (std::size_t round = 0; round <= cfg.rounds; ++round) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto labeled_fs = pool_fs.subset(pool.labeled());
            const auto model = fit(labeled_fs, cfg.learner);
            const auto probs = predict_proba(model, pool_fs);
            const auto ce = point_losses(probs, pool_labels, LossKind::kCrossEntropy);

            CurveRow row;
            row.seed = seed;
            row.round = round;
            row.labeled = pool.labeled().size();
            row.accuracy = accuracy(model, split.test);
            row.cover_radius = cover_radius(raw_oracle, pool.labeled());
            row.coreset_loss = coreset_loss(ce.values, pool.labeled());
            double train = 0.0;
            for (Index i : pool.labeled()) train += ce.values[i];
            row.train_loss = train / static_cast<double>(pool.labeled().size());

            if (round < cfg.rounds) {
                const std::size_t b = cfg.budget;
                if (b > pool.unlabeled().size()) {
                    curve.notes.push_back("seed " + std::to_string(seed) + ": pool exhausted after round " +
                                          std::to_string(round));
                    round = cfg.rounds;  // stop after recording this row
                } else {
                    const auto stream = derive_seed(seed, round + 1);
                    std::optional<FeatureSet> embedded;
                    std::optional<DistanceOracle> embedded_oracle;
                    if (cfg.embedding == Embedding::kLogits &&
                        (cfg.strategy == Strategy::kKMedoids || cfg.strategy == Strategy::kCoresetGreedy ||
                         cfg.strategy == Strategy::kCoresetRobust)) {
                        embedded.emplace(logit_embedding(model, pool_fs));
                        embedded_oracle.emplace(*embedded, cfg.oracle);
                    }
                    const DistanceOracle& oracle = embedded_oracle ? *embedded_oracle : raw_oracle;

                    std::vector<Index> batch;
                    switch (cfg.strategy) {
                        case Strategy::kRandom:
                            batch = select_random(pool, b, stream);
                            break;
                        case Strategy::kEntropy:
                            batch = select_uncertainty(probs, pool, b);
                            break;
                        case Strategy::kOracle: {
                            auto sel = select_oracle_uncertainty(ce.values, pool, b, stream);
                            if (sel.uniform_fallback)
                                curve.notes.push_back("seed " + std::to_string(seed) + " round " +
                                                      std::to_string(round) + ": zero losses, uniform draws");
                            batch = std::move(sel.indices);
                            break;
                        }
                        case Strategy::kKMedoids:
                            batch = select_kmedoids(oracle, pool, b, stream);
                            break;
                        case Strategy::kCoresetGreedy:
                        case Strategy::kCoresetRobust: {
                            const auto mode = cfg.strategy == Strategy::kCoresetGreedy ? CoresetMode::kGreedy
                                                                                       : CoresetMode::kRobust;
                            auto sel = select_coreset(oracle, pool, b, mode,
                                                      outlier_cap(cfg.xi_frac, pool.unlabeled().size()),
                                                      cfg.time_limit_s);
                            if (mode == CoresetMode::kRobust && !sel.optimal)
                                curve.notes.push_back("seed " + std::to_string(seed) + " round " +
                                                      std::to_string(round) +
                                                      ": feasibility timed out, greedy centers used");
                            batch = std::move(sel.indices);
                            break;
                        }
                    }
                    pool.label(batch);
                }
            }
            if (cfg.record_time)
                row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            curve.rows.push_back(row);
        }
    }
    return curve;
}

}  // namespace coreset::harness
