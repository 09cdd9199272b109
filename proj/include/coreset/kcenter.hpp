#pragma once

#include "coreset/cover_search.hpp"
#include "coreset/error.hpp"
#include "coreset/geometry.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace coreset {

struct KCenterSolution {
    std::vector<Index> centers;   // s0 followed by the added centers
    std::vector<Index> added;     // centers \ s0, in selection order
    std::vector<Index> outliers;  // sorted; never intersects centers
    double radius = 0.0;          // max distance of a non-outlier to its nearest center
    bool optimal = false;
    std::size_t probes = 0;       // feasibility calls made by the robust solver
};

namespace detail {

inline void check_seed_and_budget(const DistanceOracle& oracle, std::span<const Index> s0,
                                  std::size_t budget) {
    require(!s0.empty(), ErrorCode::kInvalidArgument, "initial center set s0 is empty");
    std::vector<char> seen(oracle.size(), 0);
    for (Index s : s0) {
        require(s < oracle.size(), ErrorCode::kOutOfRange, "s0 index out of range");
        require(!seen[s], ErrorCode::kInvalidArgument, "s0 contains a duplicate index");
        seen[s] = 1;
    }
    require(budget <= oracle.size() - s0.size(), ErrorCode::kInvalidArgument,
            "budget exceeds the number of non-center points");
}

}  // namespace detail

// Farthest-first traversal: starting from s0, repeatedly add the point whose
// distance to its nearest center is largest (smallest index on ties).
// Returns the `budget` added points in selection order.
inline std::vector<Index> k_center_greedy(const DistanceOracle& oracle, std::span<const Index> s0,
                                          std::size_t budget) {
    detail::check_seed_and_budget(oracle, s0, budget);
    DistanceOracle work = oracle.fresh();
    std::vector<char> chosen(oracle.size(), 0);
    for (Index s : s0) {
        work.add_center(s);
        chosen[s] = 1;
    }
    std::vector<Index> picks;
    picks.reserve(budget);
    const auto min_dist = work.min_dist();
    for (std::size_t t = 0; t < budget; ++t) {
        Index best = oracle.size();
        for (Index i = 0; i < oracle.size(); ++i) {
            if (chosen[i]) continue;
            if (best == oracle.size() || min_dist[i] > min_dist[best]) best = i;
        }
        work.add_center(best);
        chosen[best] = 1;
        picks.push_back(best);
    }
    return picks;
}

enum class FeasibilityStatus { kFeasible, kInfeasible, kTimedOut };

// Binary witness of the feasibility program, stored sparsely:
//   u_j = 1           iff j in centers
//   omega_{i,j} = 1   iff j == assignment[i]
//   xi_{i,j} = 1      iff i in outliers and j == assignment[i]
struct FeasibilityWitness {
    std::vector<Index> centers;     // sorted, |s0| + b entries
    std::vector<Index> assignment;  // size n
    std::vector<Index> outliers;    // sorted
};

struct FeasibilityResult {
    FeasibilityStatus status = FeasibilityStatus::kInfeasible;
    std::optional<FeasibilityWitness> witness;
    std::uint64_t nodes = 0;
};

struct FeasibilityOptions {
    double time_limit_s = 30.0;
};

// Re-checks every constraint of the program against a witness. Returns an
// empty string when all hold, otherwise the first violated constraint.
inline std::string check_witness(const DistanceOracle& oracle, std::size_t budget,
                                 std::span<const Index> s0, double delta, std::size_t xi_cap,
                                 const FeasibilityWitness& w) {
    const std::size_t n = oracle.size();
    std::vector<char> is_center(n, 0), is_outlier(n, 0);
    for (Index c : w.centers) {
        if (c >= n) return "center index out of range";
        if (is_center[c]) return "duplicate center";
        is_center[c] = 1;
    }
    if (w.centers.size() != s0.size() + budget) return "sum_j u_j != |s0| + b";
    for (Index s : s0)
        if (!is_center[s]) return "u_i != 1 for some i in s0";
    if (w.assignment.size() != n) return "sum_j omega_ij != 1 for some i";
    for (Index o : w.outliers) {
        if (o >= n || is_outlier[o]) return "bad outlier list";
        is_outlier[o] = 1;
    }
    if (w.outliers.size() > xi_cap) return "sum xi_ij > Xi";
    for (Index i = 0; i < n; ++i) {
        const Index j = w.assignment[i];
        if (j >= n || !is_center[j]) return "omega_ij > u_j";
        if (oracle.distance_unchecked(i, j) > delta && !is_outlier[i])
            return "omega_ij != xi_ij for a pair farther than delta";
    }
    return {};
}

namespace detail {

// Completes a set of extra centers into a full witness: pads to exactly
// |s0| + budget centers (smallest free indices), assigns every point to its
// nearest center (smallest index on ties) and marks those beyond delta.
inline FeasibilityWitness build_witness(const DistanceOracle& oracle, std::span<const Index> s0,
                                        std::span<const Index> extra, std::size_t budget,
                                        double delta) {
    const std::size_t n = oracle.size();
    std::vector<char> is_center(n, 0);
    FeasibilityWitness w;
    for (Index s : s0) is_center[s] = 1;
    std::size_t added = 0;
    for (Index e : extra) {
        if (!is_center[e] && added < budget) {
            is_center[e] = 1;
            ++added;
        }
    }
    for (Index i = 0; i < n && added < budget; ++i) {
        if (!is_center[i]) {
            is_center[i] = 1;
            ++added;
        }
    }
    for (Index i = 0; i < n; ++i)
        if (is_center[i]) w.centers.push_back(i);
    w.assignment.resize(n);
    for (Index i = 0; i < n; ++i) {
        Index best = w.centers.front();
        double best_d = oracle.distance_unchecked(i, best);
        for (Index c : w.centers) {
            const double d = oracle.distance_unchecked(i, c);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        w.assignment[i] = best;
        if (best_d > delta) w.outliers.push_back(i);
    }
    return w;
}

}  // namespace detail

// Decides whether `budget` extra centers plus s0 can cover all but at most
// `xi_cap` points within distance `delta`, and returns a witness when they can.
inline FeasibilityResult feasible(const DistanceOracle& oracle, std::size_t budget,
                                  std::span<const Index> s0, double delta, std::size_t xi_cap,
                                  FeasibilityOptions options = {}) {
    detail::check_seed_and_budget(oracle, s0, budget);
    require(delta >= 0.0 && !std::isnan(delta), ErrorCode::kInvalidArgument, "delta must be >= 0");

    FeasibilityResult result;
    auto accept = [&](std::span<const Index> extra) {
        auto w = detail::build_witness(oracle, s0, extra, budget, delta);
        if (w.outliers.size() > xi_cap) return false;
        result.status = FeasibilityStatus::kFeasible;
        result.witness = std::move(w);
        return true;
    };

    // Incumbent from farthest-first traversal.
    const auto greedy = k_center_greedy(oracle, s0, budget);
    if (accept(greedy)) return result;

    auto cover = detail::solve_cover(oracle, s0, delta, budget, xi_cap, options.time_limit_s);
    result.nodes = cover.nodes;
    switch (cover.outcome) {
        case detail::CoverOutcome::kTimedOut:
            result.status = FeasibilityStatus::kTimedOut;
            break;
        case detail::CoverOutcome::kInfeasible:
            result.status = FeasibilityStatus::kInfeasible;
            break;
        case detail::CoverOutcome::kFeasible:
            if (!accept(cover.centers))
                fail(ErrorCode::kInvalidArgument, "internal: search solution violates the cover");
            break;
    }
    return result;
}

// Sorted set of realized pairwise distances (including 0), used to snap the
// binary search bracket. Materialized when the oracle caches its matrix,
// otherwise each query scans all pairs.
class DistanceGrid {
  public:
    explicit DistanceGrid(const DistanceOracle& oracle) : oracle_(oracle) {
        if (!oracle.cached()) return;
        const std::size_t n = oracle.size();
        values_.reserve(n * (n - 1) / 2 + 1);
        values_.push_back(0.0);
        for (Index i = 0; i < n; ++i)
            for (Index j = i + 1; j < n; ++j) values_.push_back(oracle.distance_unchecked(i, j));
        std::sort(values_.begin(), values_.end());
        values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
    }

    // Largest realized distance <= x (x >= 0).
    double at_most(double x) const {
        if (!values_.empty()) return *(std::upper_bound(values_.begin(), values_.end(), x) - 1);
        double best = 0.0;
        scan([&](double d) {
            if (d <= x && d > best) best = d;
        });
        return best;
    }

    // Smallest realized distance >= x, or > x when `strict`. Returns +inf if none.
    double at_least(double x, bool strict = false) const {
        const double inf = std::numeric_limits<double>::infinity();
        if (!values_.empty()) {
            auto it = strict ? std::upper_bound(values_.begin(), values_.end(), x)
                             : std::lower_bound(values_.begin(), values_.end(), x);
            return it == values_.end() ? inf : *it;
        }
        double best = inf;
        auto consider = [&](double d) {
            if ((strict ? d > x : d >= x) && d < best) best = d;
        };
        consider(0.0);
        scan(consider);
        return best;
    }

  private:
    template <typename F>
    void scan(F&& f) const {
        for (Index i = 0; i < oracle_.size(); ++i)
            for (Index j = i + 1; j < oracle_.size(); ++j) f(oracle_.distance_unchecked(i, j));
    }

    const DistanceOracle& oracle_;
    std::vector<double> values_;
};

struct RobustOptions {
    double time_limit_s = 30.0;  // per feasibility probe
};

// Binary search over realized distances between the greedy radius and half of
// it, deciding each midpoint with feasible(). With outliers allowed the optimum
// can sit below half the greedy radius; in that case the lower end of the
// bracket is extended to 0 once the half-radius probe succeeds.
// Falls back to the greedy solution (optimal = false) if any probe times out.
inline KCenterSolution robust_k_center(const DistanceOracle& oracle, std::span<const Index> s0,
                                       std::size_t budget, std::size_t xi_cap,
                                       RobustOptions options = {}) {
    const auto greedy = k_center_greedy(oracle, s0, budget);
    std::vector<Index> greedy_centers(s0.begin(), s0.end());
    greedy_centers.insert(greedy_centers.end(), greedy.begin(), greedy.end());
    const double greedy_radius = cover_radius(oracle, greedy_centers);

    KCenterSolution fallback{greedy_centers, greedy, {}, greedy_radius, false, 0};

    const DistanceGrid grid(oracle);
    double ub = greedy_radius;
    double lb = grid.at_least(greedy_radius / 2.0);
    std::optional<FeasibilityWitness> best;
    std::size_t probes = 0;

    auto probe = [&](double delta) -> std::optional<bool> {
        ++probes;
        auto r = feasible(oracle, budget, s0, delta, xi_cap, {options.time_limit_s});
        if (r.status == FeasibilityStatus::kTimedOut) return std::nullopt;
        if (r.status == FeasibilityStatus::kFeasible) best = std::move(r.witness);
        return r.status == FeasibilityStatus::kFeasible;
    };

    if (xi_cap > 0) {
        std::optional<bool> ok = true;
        if (lb < ub) ok = probe(lb);
        if (!ok) {
            fallback.probes = probes;
            return fallback;
        }
        if (*ok) {
            ub = lb;
            lb = 0.0;
        } else {
            lb = grid.at_least(lb, true);
        }
    }
    while (lb < ub) {
        const double mid = (lb + ub) / 2.0;
        auto ok = probe(mid);
        if (!ok) {
            fallback.probes = probes;
            return fallback;
        }
        if (*ok) {
            ub = grid.at_most(mid);
        } else {
            lb = grid.at_least(mid);
            if (lb == mid) lb = grid.at_least(mid, true);
        }
    }

    KCenterSolution out;
    out.optimal = true;
    out.probes = probes;
    out.radius = ub;
    const auto w = best ? *best : detail::build_witness(oracle, s0, greedy, budget, ub);
    std::vector<char> in_s0(oracle.size(), 0);
    for (Index s : s0) in_s0[s] = 1;
    out.centers.assign(s0.begin(), s0.end());
    for (Index c : w.centers) {
        if (in_s0[c]) continue;
        out.centers.push_back(c);
        out.added.push_back(c);
    }
    out.outliers = w.outliers;
    return out;
}

// Farthest-first solution packaged like the robust one (no outliers).
inline KCenterSolution greedy_k_center(const DistanceOracle& oracle, std::span<const Index> s0,
                                       std::size_t budget) {
    auto added = k_center_greedy(oracle, s0, budget);
    std::vector<Index> centers(s0.begin(), s0.end());
    centers.insert(centers.end(), added.begin(), added.end());
    const double radius = cover_radius(oracle, centers);
    return {std::move(centers), std::move(added), {}, radius, false, 0};
}

}  // namespace coreset
