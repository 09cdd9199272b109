#pragma once

#include "coreset/error.hpp"
#include "coreset/geometry.hpp"
#include "coreset/kcenter.hpp"
#include "coreset/matrix.hpp"
#include "coreset/pool.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coreset {

enum class Strategy { kRandom, kEntropy, kOracle, kKMedoids, kCoresetGreedy, kCoresetRobust };

inline std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::kRandom: return "random";
        case Strategy::kEntropy: return "entropy";
        case Strategy::kOracle: return "oracle";
        case Strategy::kKMedoids: return "kmedoids";
        case Strategy::kCoresetGreedy: return "coreset-greedy";
        case Strategy::kCoresetRobust: return "coreset-robust";
    }
    return "unknown";
}

inline Strategy parse_strategy(std::string_view id) {
    for (auto s : {Strategy::kRandom, Strategy::kEntropy, Strategy::kOracle, Strategy::kKMedoids,
                   Strategy::kCoresetGreedy, Strategy::kCoresetRobust})
        if (to_string(s) == id) return s;
    fail(ErrorCode::kInvalidArgument, "unknown strategy '" + std::string(id) + "'");
}

namespace detail {

inline void check_budget(const PoolState& pool, std::size_t b) {
    require(b <= pool.unlabeled().size(), ErrorCode::kInvalidArgument, "budget exceeds unlabeled pool");
}

}  // namespace detail

// b unlabeled points uniformly without replacement, in draw order.
inline std::vector<Index> select_random(const PoolState& pool, std::size_t b, std::uint64_t seed) {
    detail::check_budget(pool, b);
    std::mt19937_64 rng(seed);
    std::vector<Index> candidates = pool.unlabeled();
    for (std::size_t k = 0; k < b; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, candidates.size() - 1);
        std::swap(candidates[k], candidates[pick(rng)]);
    }
    candidates.resize(b);
    return candidates;
}

// Shannon entropy in nats; 0 log 0 = 0.
inline double entropy(std::span<const double> p) noexcept {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

// Top-b unlabeled points by predictive entropy. `probs` has one row per pool
// point.
inline std::vector<Index> select_uncertainty(const Matrix& probs, const PoolState& pool, std::size_t b) {
    detail::check_budget(pool, b);
    require(probs.rows == pool.size(), ErrorCode::kInvalidArgument, "need probabilities for every pool point");
    std::vector<std::pair<double, Index>> scored;
    for (Index i : pool.unlabeled()) scored.emplace_back(entropy(probs.row(i)), i);
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<Index> out;
    for (std::size_t k = 0; k < b; ++k) out.push_back(scored[k].second);
    return out;
}

struct OracleSelection {
    std::vector<Index> indices;
    bool uniform_fallback = false;  // some draws were uniform: no positive loss was left
};

// Sequential sampling without replacement, each draw proportional to the
// remaining points' losses. `losses` has one entry per pool point.
inline OracleSelection select_oracle_uncertainty(std::span<const double> losses, const PoolState& pool,
                                                 std::size_t b, std::uint64_t seed) {
    detail::check_budget(pool, b);
    require(losses.size() == pool.size(), ErrorCode::kInvalidArgument, "need a loss for every pool point");
    std::vector<Index> candidates = pool.unlabeled();
    std::vector<double> weights;
    for (Index i : candidates) {
        require(losses[i] >= 0.0 && std::isfinite(losses[i]), ErrorCode::kInvalidArgument,
                "losses must be finite and nonnegative");
        weights.push_back(losses[i]);
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    OracleSelection out;
    for (std::size_t k = 0; k < b; ++k) {
        const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
        std::size_t pick = 0;
        if (total > 0.0) {
            const double target = unit(rng) * total;
            double run = 0.0;
            pick = weights.size();
            for (std::size_t t = 0; t < weights.size(); ++t) {
                if (weights[t] <= 0.0) continue;
                run += weights[t];
                pick = t;
                if (target < run) break;
            }
        } else {
            out.uniform_fallback = true;
            pick = std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng);
        }
        out.indices.push_back(candidates[pick]);
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));
        weights.erase(weights.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return out;
}

struct MedoidResult {
    std::vector<Index> medoids;  // pool indices
    double cost = 0.0;           // sum over unlabeled points of distance to the nearest medoid
};

// k-medoids over the unlabeled points with k = b: greedy BUILD, then up to 10
// passes of the best single swap (evaluated in O(n^2) per pass with the
// nearest / second-nearest bookkeeping of FastPAM1). The seed orders BUILD
// candidates, which only matters for exact ties.
inline MedoidResult kmedoids(const DistanceOracle& oracle, const PoolState& pool, std::size_t b,
                             std::uint64_t seed, int max_swap_passes = 10) {
    detail::check_budget(pool, b);
    require(oracle.size() == pool.size(), ErrorCode::kInvalidArgument, "oracle does not match pool");
    const auto& pts = pool.unlabeled();
    const std::size_t n = pts.size();
    MedoidResult out;
    if (b == 0) return out;

    auto dist = [&](std::size_t a, std::size_t c) { return oracle.distance_unchecked(pts[a], pts[c]); };
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), std::mt19937_64(seed));

    std::vector<char> is_medoid(n, 0);
    std::vector<std::size_t> medoids;
    std::vector<double> nearest(n, inf);
    for (std::size_t k = 0; k < b; ++k) {
        double best_gain = -inf;
        std::size_t best = n;
        for (auto c : order) {
            if (is_medoid[c]) continue;
            double gain = 0.0;
            for (std::size_t o = 0; o < n; ++o) {
                const double d = dist(o, c);
                gain += k == 0 ? -d : std::max(nearest[o] - d, 0.0);
            }
            if (gain > best_gain) {
                best_gain = gain;
                best = c;
            }
        }
        is_medoid[best] = 1;
        medoids.push_back(best);
        for (std::size_t o = 0; o < n; ++o) nearest[o] = std::min(nearest[o], dist(o, best));
    }

    std::vector<std::size_t> near_slot(n);
    std::vector<double> d1(n), d2(n);
    auto assign = [&] {
        double total = 0.0;
        for (std::size_t o = 0; o < n; ++o) {
            d1[o] = d2[o] = inf;
            for (std::size_t m = 0; m < medoids.size(); ++m) {
                const double d = dist(o, medoids[m]);
                if (d < d1[o]) {
                    d2[o] = d1[o];
                    d1[o] = d;
                    near_slot[o] = m;
                } else if (d < d2[o]) {
                    d2[o] = d;
                }
            }
            total += d1[o];
        }
        return total;
    };
    double cost = assign();

    std::vector<double> removal(b), delta(b);
    for (int pass = 0; pass < max_swap_passes && b < n; ++pass) {
        std::fill(removal.begin(), removal.end(), 0.0);
        if (b > 1)
            for (std::size_t o = 0; o < n; ++o) removal[near_slot[o]] += d2[o] - d1[o];

        double best_change = 0.0;
        std::size_t best_slot = b, best_in = n;
        for (std::size_t c = 0; c < n; ++c) {
            if (is_medoid[c]) continue;
            delta = removal;
            double shared = 0.0;
            for (std::size_t o = 0; o < n; ++o) {
                const double d = dist(o, c);
                if (d < d1[o]) {
                    shared += d - d1[o];
                    if (b > 1) delta[near_slot[o]] += d1[o] - d2[o];
                } else if (b == 1) {
                    delta[near_slot[o]] += d - d1[o];
                } else if (d < d2[o]) {
                    delta[near_slot[o]] += d - d2[o];
                }
            }
            for (std::size_t m = 0; m < b; ++m) {
                const double change = delta[m] + shared;
                if (change < best_change) {
                    best_change = change;
                    best_slot = m;
                    best_in = c;
                }
            }
        }
        if (best_in == n || best_change > -1e-12 * std::max(cost, 1.0)) break;
        is_medoid[medoids[best_slot]] = 0;
        is_medoid[best_in] = 1;
        medoids[best_slot] = best_in;
        cost = assign();
    }

    for (auto m : medoids) out.medoids.push_back(pts[m]);
    out.cost = cost;
    return out;
}

inline std::vector<Index> select_kmedoids(const DistanceOracle& oracle, const PoolState& pool,
                                          std::size_t b, std::uint64_t seed) {
    return kmedoids(oracle, pool, b, seed).medoids;
}

enum class CoresetMode { kGreedy, kRobust };

struct CoresetSelection {
    std::vector<Index> indices;  // new points only
    std::vector<Index> outliers;
    double radius = 0.0;         // cover radius of labeled + new over the pool (outliers excluded)
    bool optimal = false;
};

// k-Center selection with the labeled set as fixed centers.
inline CoresetSelection select_coreset(const DistanceOracle& oracle, const PoolState& pool, std::size_t b,
                                       CoresetMode mode, std::size_t xi_cap = 0,
                                       double time_limit_s = 30.0) {
    detail::check_budget(pool, b);
    require(oracle.size() == pool.size(), ErrorCode::kInvalidArgument, "oracle does not match pool");
    require(!pool.labeled().empty(), ErrorCode::kInvalidArgument, "core-set selection needs a labeled seed");
    CoresetSelection out;
    if (b == 0) {
        out.radius = cover_radius(oracle, pool.labeled());
        return out;
    }
    const auto sol = mode == CoresetMode::kGreedy
                         ? greedy_k_center(oracle, pool.labeled(), b)
                         : robust_k_center(oracle, pool.labeled(), b, xi_cap, {time_limit_s});
    out.indices = sol.added;
    out.outliers = sol.outliers;
    out.radius = sol.radius;
    out.optimal = sol.optimal;
    return out;
}

}  // namespace coreset
