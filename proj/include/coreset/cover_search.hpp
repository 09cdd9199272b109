#pragma once

#include "coreset/geometry.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

// Exact decision procedure behind feasible(): can `budget` extra centers (on
// top of s0) leave at most `xi_cap` points farther than delta from every
// center?
//
// Only "open" points (farther than delta from s0) matter, and only points
// within delta of an open point are useful centers, so the question becomes a
// budgeted set cover:
//
//  * dominated candidates (coverage contained in another candidate's) and,
//    without outliers, dominated points (candidate list containing another
//    point's list) are removed;
//  * without outliers, the instance splits into connected components that
//    only compete for budget; all but the largest get an exact minimum via
//    iterative deepening from their lower bound, and the largest is searched
//    once with the budget that remains;
//  * each component (or the whole instance, with outliers) is searched by
//    depth-first branch-and-bound. A node branches on the open point with the
//    fewest allowed candidates: one of them is chosen (earlier siblings become
//    forbidden) or the point is declared an outlier. Nodes are pruned by a
//    disjoint-candidate packing count and by a Lagrangian relaxation of the
//    cover rows, whose reduced costs also fix candidates in or out;
//  * incumbents come from greedy covers, both plain and priced by the
//    Lagrangian reduced costs.
namespace coreset::detail {

using Clock = std::chrono::steady_clock;
using Lists = std::vector<std::vector<std::uint32_t>>;

inline constexpr auto kNoIndex = std::numeric_limits<std::uint32_t>::max();

// Rows are open points, columns are candidate centers.
struct CoverInstance {
    std::vector<Index> rows;    // row -> point
    Lists cols;                 // column -> rows it covers (sorted)
    std::vector<Index> points;  // column -> point
};

inline Lists transpose(const Lists& lists, std::size_t count) {
    Lists out(count);
    for (std::uint32_t a = 0; a < lists.size(); ++a)
        for (auto b : lists[a]) out[b].push_back(a);
    return out;
}

inline CoverInstance build_cover_instance(const DistanceOracle& oracle, std::span<const Index> s0,
                                          double delta) {
    const std::size_t n = oracle.size();
    std::vector<char> in_s0(n, 0);
    for (Index s : s0) in_s0[s] = 1;

    CoverInstance inst;
    for (Index i = 0; i < n; ++i) {
        bool covered = false;
        for (Index s : s0) {
            if (oracle.distance_unchecked(i, s) <= delta) {
                covered = true;
                break;
            }
        }
        if (!covered) inst.rows.push_back(i);
    }
    for (Index j = 0; j < n; ++j) {
        if (in_s0[j]) continue;
        std::vector<std::uint32_t> covers;
        for (std::uint32_t u = 0; u < inst.rows.size(); ++u)
            if (oracle.distance_unchecked(inst.rows[u], j) <= delta) covers.push_back(u);
        if (covers.empty()) continue;
        inst.points.push_back(j);
        inst.cols.push_back(std::move(covers));
    }
    return inst;
}

// Flags every list that is a superset of another list (identical lists: all
// but the lowest index). `back` is the transpose of `lists`.
inline std::vector<char> supersets(const Lists& lists, const Lists& back) {
    std::vector<char> dropped(lists.size(), 0);
    std::vector<std::uint32_t> mark(back.size(), kNoIndex);
    for (std::uint32_t a = 0; a < lists.size(); ++a) {
        if (lists[a].empty()) continue;
        for (auto x : lists[a]) mark[x] = a;
        // Any superset of lists[a] shares its first element.
        for (auto b : back[lists[a].front()]) {
            if (b == a || dropped[b] || lists[b].size() < lists[a].size()) continue;
            if (lists[b].size() == lists[a].size() && b < a) continue;
            std::size_t hit = 0;
            for (auto x : lists[b]) hit += mark[x] == a;
            if (hit == lists[a].size()) dropped[b] = 1;
        }
    }
    return dropped;
}

// Flags every list that is a subset of another list (identical lists: all
// but the lowest index).
inline std::vector<char> subsets(const Lists& lists, const Lists& back) {
    std::vector<char> dropped(lists.size(), 0);
    std::vector<std::uint32_t> mark(back.size(), kNoIndex);
    for (std::uint32_t a = 0; a < lists.size(); ++a) {
        if (lists[a].empty()) continue;
        for (auto x : lists[a]) mark[x] = a;
        for (auto b : back[lists[a].front()]) {
            if (b == a || dropped[b] || lists[b].size() < lists[a].size()) continue;
            if (lists[b].size() == lists[a].size() && b > a) continue;
            std::size_t hit = 0;
            for (auto x : lists[b]) hit += mark[x] == a;
            if (hit == lists[a].size()) {
                dropped[a] = 1;
                break;
            }
        }
    }
    return dropped;
}

inline void drop_columns(CoverInstance& inst, const std::vector<char>& drop) {
    Lists cols;
    std::vector<Index> points;
    for (std::size_t c = 0; c < inst.cols.size(); ++c) {
        if (drop[c] || inst.cols[c].empty()) continue;
        cols.push_back(std::move(inst.cols[c]));
        points.push_back(inst.points[c]);
    }
    inst.cols = std::move(cols);
    inst.points = std::move(points);
}

inline void drop_rows(CoverInstance& inst, const std::vector<char>& drop) {
    std::vector<std::uint32_t> remap(inst.rows.size(), kNoIndex);
    std::vector<Index> rows;
    for (std::uint32_t u = 0; u < inst.rows.size(); ++u) {
        if (drop[u]) continue;
        remap[u] = static_cast<std::uint32_t>(rows.size());
        rows.push_back(inst.rows[u]);
    }
    for (auto& col : inst.cols) {
        std::vector<std::uint32_t> next;
        for (auto u : col)
            if (remap[u] != kNoIndex) next.push_back(remap[u]);
        col = std::move(next);
    }
    inst.rows = std::move(rows);
    drop_columns(inst, std::vector<char>(inst.cols.size(), 0));
}

// Column dominance always; row dominance only when no outliers are allowed,
// since a dominated row may still need covering when its dominator is an
// outlier.
inline void reduce(CoverInstance& inst, bool rows_too) {
    for (int round = 0; round < 8; ++round) {
        const std::size_t rows = inst.rows.size(), cols = inst.cols.size();
        drop_columns(inst, subsets(inst.cols, transpose(inst.cols, inst.rows.size())));
        if (rows_too) {
            const auto by_row = transpose(inst.cols, inst.rows.size());
            drop_rows(inst, supersets(by_row, inst.cols));
        }
        if (rows == inst.rows.size() && cols == inst.cols.size()) break;
    }
}

inline std::vector<CoverInstance> split_components(const CoverInstance& inst) {
    const std::size_t rows = inst.rows.size();
    std::vector<std::uint32_t> parent(rows);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& col : inst.cols)
        for (std::size_t t = 1; t < col.size(); ++t) parent[find(col[t])] = find(col[0]);

    std::vector<std::uint32_t> part_of_root(rows, kNoIndex);
    std::vector<std::uint32_t> local(rows);
    std::vector<CoverInstance> parts;
    for (std::uint32_t u = 0; u < rows; ++u) {
        const auto r = find(u);
        if (part_of_root[r] == kNoIndex) {
            part_of_root[r] = static_cast<std::uint32_t>(parts.size());
            parts.emplace_back();
        }
        auto& part = parts[part_of_root[r]];
        local[u] = static_cast<std::uint32_t>(part.rows.size());
        part.rows.push_back(inst.rows[u]);
    }
    for (std::size_t c = 0; c < inst.cols.size(); ++c) {
        auto& part = parts[part_of_root[find(inst.cols[c].front())]];
        std::vector<std::uint32_t> col;
        for (auto u : inst.cols[c]) col.push_back(local[u]);
        part.cols.push_back(std::move(col));
        part.points.push_back(inst.points[c]);
    }
    return parts;
}

// Branch-and-bound over one cover instance with a center budget and an
// outlier allowance.
class CoverSearch {
  public:
    CoverSearch(const CoverInstance& inst, std::size_t budget, std::size_t xi_cap,
                Clock::time_point deadline)
        : inst_(inst), budget_(budget), xi_cap_(xi_cap), deadline_(deadline) {
        const std::size_t rows = inst.rows.size(), cols = inst.cols.size();
        cand_ = transpose(inst.cols, rows);
        cover_count_.assign(rows, 0);
        outlier_.assign(rows, 0);
        avail_.resize(rows);
        for (std::uint32_t u = 0; u < rows; ++u) avail_[u] = static_cast<std::uint32_t>(cand_[u].size());
        forbidden_.assign(cols, 0);
        chosen_.assign(cols, 0);
        stamp_.assign(cols, 0);
        lambda_.assign(rows, 0.0);
        for (std::uint32_t u = 0; u < rows; ++u)
            if (!cand_[u].empty()) lambda_[u] = 1.0 / static_cast<double>(cand_[u].size());
        subgrad_.assign(rows, 0.0);
        reduced_.assign(cols, 0.0);
        remaining_ = rows;
        packing_order_.resize(rows);
        std::iota(packing_order_.begin(), packing_order_.end(), 0u);
        std::stable_sort(packing_order_.begin(), packing_order_.end(),
                         [&](auto a, auto b) { return cand_[a].size() < cand_[b].size(); });
    }

    // Greedy max-coverage, optionally weighting rows by the Lagrange
    // multipliers. Stops once `max_picks` columns are used or all but xi_cap
    // rows are covered; reports whether the picks form a valid cover.
    std::pair<bool, std::vector<Index>> greedy_cover(bool weighted, std::size_t max_picks) const {
        std::vector<char> covered(inst_.rows.size(), 0);
        std::size_t left = inst_.rows.size();
        std::vector<Index> picks;
        while (picks.size() < max_picks && left > xi_cap_) {
            double best_score = 0.0;
            std::uint32_t best = kNoIndex;
            for (std::uint32_t c = 0; c < inst_.cols.size(); ++c) {
                double score = 0.0;
                for (auto u : inst_.cols[c])
                    if (!covered[u]) score += weighted ? 1e-6 + lambda_[u] : 1.0;
                if (score > best_score) {
                    best_score = score;
                    best = c;
                }
            }
            if (best == kNoIndex) break;
            for (auto u : inst_.cols[best]) {
                if (!covered[u]) {
                    covered[u] = 1;
                    --left;
                }
            }
            picks.push_back(inst_.points[best]);
        }
        return {left <= xi_cap_, std::move(picks)};
    }

    // Lower bound on (#centers + #outliers) for the whole instance: the
    // packing count or a long subgradient run aimed at `target`.
    std::size_t lower_bound(double target) {
        xi_left_ = xi_cap_;
        const std::size_t packing = packing_bound();
        const double lagrangian = subgradient(target, true, kInf);
        const auto rounded = static_cast<std::size_t>(std::max(0.0, std::ceil(lagrangian - kEps)));
        return std::max(packing, rounded);
    }

    enum class Outcome { kFound, kExhausted, kTimedOut };

    Outcome run() {
        picks_.clear();
        const bool found = search(budget_, xi_cap_, true);
        if (timed_out_) return Outcome::kTimedOut;
        return found ? Outcome::kFound : Outcome::kExhausted;
    }

    const std::vector<Index>& solution() const noexcept { return solution_; }

    // Smallest full cover found by the Lagrangian heuristic during
    // lower_bound(); empty if none.
    std::vector<Index> heuristic_cover() const {
        std::vector<Index> out;
        for (auto c : best_cover_) out.push_back(inst_.points[c]);
        return out;
    }
    std::uint64_t nodes() const noexcept { return nodes_; }

  private:
    static constexpr double kEps = 1e-9;
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    bool expired() {
        if ((++nodes_ & 63u) == 0 && Clock::now() > deadline_) timed_out_ = true;
        return timed_out_;
    }

    bool is_open(std::uint32_t u) const { return cover_count_[u] == 0 && !outlier_[u]; }
    bool usable(std::uint32_t c) const { return forbidden_[c] == 0 && !chosen_[c]; }

    // Open rows whose usable candidate lists are pairwise disjoint each need
    // their own center or an outlier slot.
    std::size_t packing_bound() {
        ++epoch_;
        std::size_t count = 0;
        for (auto u : packing_order_) {
            if (!is_open(u)) continue;
            bool disjoint = true;
            for (auto c : cand_[u]) {
                if (usable(c) && stamp_[c] == epoch_) {
                    disjoint = false;
                    break;
                }
            }
            if (!disjoint) continue;
            ++count;
            for (auto c : cand_[u])
                if (usable(c)) stamp_[c] = epoch_;
        }
        return count;
    }

    // Lagrangian relaxation of the residual problem "cover every open row with
    // a usable column or, while outliers remain, a unit-cost outlier slot".
    // Every multiplier vector gives a lower bound on #columns + #outliers.
    // Returns the best bound seen, leaving its reduced costs in best_reduced_;
    // stops early once the bound exceeds `stop_above`.
    double subgradient(double target, bool root, double stop_above) {
        const bool singletons = xi_left_ > 0;
        const int iterations = root ? 3000 : 10;
        const int patience = root ? 30 : 3;
        double scale = root ? 2.0 : 0.5;
        double best = -kInf;
        int stall = 0;
        best_reduced_.assign(inst_.cols.size(), 0.0);

        for (int it = 0; it < iterations; ++it) {
            double bound = 0.0;
            for (std::uint32_t u = 0; u < inst_.rows.size(); ++u) {
                if (!is_open(u)) continue;
                bound += lambda_[u];
                subgrad_[u] = 1.0;
                if (singletons && lambda_[u] > 1.0) {
                    bound += 1.0 - lambda_[u];
                    subgrad_[u] -= 1.0;
                }
            }
            for (std::uint32_t c = 0; c < inst_.cols.size(); ++c) {
                if (!usable(c)) continue;
                double s = 0.0;
                for (auto u : inst_.cols[c])
                    if (is_open(u)) s += lambda_[u];
                reduced_[c] = 1.0 - s;
                if (reduced_[c] < 0.0) {
                    bound += reduced_[c];
                    for (auto u : inst_.cols[c])
                        if (is_open(u)) subgrad_[u] -= 1.0;
                }
            }
            if (bound > best + 1e-12) {
                best = bound;
                best_reduced_ = reduced_;
                stall = 0;
            } else if (++stall >= patience) {
                scale *= 0.5;
                stall = 0;
            }
            if (best > stop_above) break;
            if (root && it % 5 == 0) lagrangian_cover();

            double norm = 0.0;
            for (std::uint32_t u = 0; u < inst_.rows.size(); ++u) {
                if (!is_open(u)) continue;
                if (lambda_[u] <= 0.0 && subgrad_[u] < 0.0) subgrad_[u] = 0.0;
                norm += subgrad_[u] * subgrad_[u];
            }
            if (norm == 0.0 || scale < 1e-4) break;
            const double step = scale * std::max(target - bound, 1e-3) / norm;
            for (std::uint32_t u = 0; u < inst_.rows.size(); ++u)
                if (is_open(u)) lambda_[u] = std::max(0.0, lambda_[u] + step * subgrad_[u]);
        }
        return best;
    }

    // Greedy cover priced by the current reduced costs, then stripped of
    // redundant columns; keeps the smallest full cover seen in best_cover_.
    void lagrangian_cover() {
        const std::size_t rows = inst_.rows.size(), cols = inst_.cols.size();
        std::vector<std::uint32_t> gain(cols), count(rows, 0);
        for (std::uint32_t c = 0; c < cols; ++c) gain[c] = static_cast<std::uint32_t>(inst_.cols[c].size());
        std::vector<std::uint32_t> picks;
        std::size_t left = rows;
        while (left > 0) {
            double best_score = kInf;
            std::uint32_t best = kNoIndex;
            for (std::uint32_t c = 0; c < cols; ++c) {
                if (gain[c] == 0) continue;
                const double r = reduced_[c], g = gain[c];
                const double score = r > 0.0 ? r / g : r * g;
                if (score < best_score) {
                    best_score = score;
                    best = c;
                }
            }
            if (best == kNoIndex) return;
            picks.push_back(best);
            for (auto u : inst_.cols[best]) {
                if (count[u]++ == 0) {
                    --left;
                    for (auto c : cand_[u]) --gain[c];
                }
            }
            if (!best_cover_.empty() && picks.size() > best_cover_.size() + rows) return;
        }
        std::stable_sort(picks.begin(), picks.end(), [&](auto a, auto b) { return reduced_[a] > reduced_[b]; });
        std::vector<std::uint32_t> kept;
        for (auto c : picks) {
            bool redundant = true;
            for (auto u : inst_.cols[c]) redundant = redundant && count[u] >= 2;
            if (redundant)
                for (auto u : inst_.cols[c]) --count[u];
            else
                kept.push_back(c);
        }
        if (best_cover_.empty() || kept.size() < best_cover_.size()) best_cover_ = std::move(kept);
    }

    void choose(std::uint32_t c) {
        chosen_[c] = 1;
        for (auto u : inst_.cols[c])
            if (cover_count_[u]++ == 0 && !outlier_[u]) --remaining_;
        picks_.push_back(inst_.points[c]);
    }

    void unchoose(std::uint32_t c) {
        chosen_[c] = 0;
        for (auto u : inst_.cols[c])
            if (--cover_count_[u] == 0 && !outlier_[u]) ++remaining_;
        picks_.pop_back();
    }

    void forbid(std::uint32_t c) {
        if (forbidden_[c]++ == 0)
            for (auto u : inst_.cols[c]) --avail_[u];
    }

    void allow(std::uint32_t c) {
        if (--forbidden_[c] == 0)
            for (auto u : inst_.cols[c]) ++avail_[u];
    }

    bool search(std::size_t k_left, std::size_t xi_left, bool root) {
        if (expired()) return false;
        if (remaining_ <= xi_left) {
            solution_ = picks_;
            return true;
        }
        if (k_left == 0 && xi_left == 0) return false;
        const double limit = static_cast<double>(k_left + xi_left);
        if (static_cast<double>(packing_bound()) > limit) return false;

        xi_left_ = xi_left;
        const double bound = subgradient(limit + 1.0, root, limit + kEps);
        if (bound > limit + kEps) return false;

        // Reduced-cost fixing: a column whose inclusion (exclusion) pushes the
        // bound past the limit is out of (in) every completion.
        std::vector<std::uint32_t> fixed, forced;
        for (std::uint32_t c = 0; c < inst_.cols.size(); ++c) {
            if (!usable(c)) continue;
            const double r = best_reduced_[c];
            if (r > 0.0 && bound + r > limit + kEps)
                fixed.push_back(c);
            else if (r < 0.0 && bound - r > limit + kEps)
                forced.push_back(c);
        }
        for (auto c : fixed) forbid(c);

        bool found = false;
        if (forced.empty()) {
            found = branch(k_left, xi_left);
        } else if (forced.size() <= k_left) {
            for (auto c : forced) choose(c);
            found = search(k_left - forced.size(), xi_left, false);
            for (auto it = forced.rbegin(); it != forced.rend(); ++it) unchoose(*it);
        }
        for (auto c : fixed) allow(c);
        return found;
    }

    bool branch(std::size_t k_left, std::size_t xi_left) {
        std::uint32_t pivot = kNoIndex;
        for (std::uint32_t u = 0; u < inst_.rows.size(); ++u)
            if (is_open(u) && (pivot == kNoIndex || avail_[u] < avail_[pivot])) pivot = u;

        std::vector<std::pair<double, std::uint32_t>> options;
        if (k_left > 0) {
            for (auto c : cand_[pivot])
                if (usable(c)) options.emplace_back(best_reduced_[c], c);
            // Lowest reduced cost first.
            std::stable_sort(options.begin(), options.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
        }

        bool found = false;
        std::size_t forbidden_here = 0;
        for (const auto& option : options) {
            const auto c = option.second;
            choose(c);
            found = search(k_left - 1, xi_left, false);
            unchoose(c);
            if (found || timed_out_) break;
            forbid(c);
            ++forbidden_here;
        }
        if (!found && !timed_out_ && xi_left > 0) {
            outlier_[pivot] = 1;
            --remaining_;
            found = search(k_left, xi_left - 1, false);
            ++remaining_;
            outlier_[pivot] = 0;
        }
        for (std::size_t t = 0; t < forbidden_here; ++t) allow(options[t].second);
        return found;
    }

    const CoverInstance& inst_;
    std::size_t budget_;
    std::size_t xi_cap_;
    Clock::time_point deadline_;

    Lists cand_;  // row -> columns covering it
    std::vector<std::uint32_t> packing_order_;

    std::vector<std::uint32_t> cover_count_;
    std::vector<std::uint32_t> avail_;
    std::vector<char> outlier_;
    std::vector<std::uint32_t> forbidden_;
    std::vector<char> chosen_;
    std::vector<std::uint64_t> stamp_;
    std::uint64_t epoch_ = 0;
    std::size_t remaining_ = 0;
    std::size_t xi_left_ = 0;

    std::vector<double> lambda_;
    std::vector<double> subgrad_;
    std::vector<double> reduced_;
    std::vector<double> best_reduced_;

    std::vector<std::uint32_t> best_cover_;
    std::vector<Index> picks_;
    std::vector<Index> solution_;
    std::uint64_t nodes_ = 0;
    bool timed_out_ = false;
};

enum class CoverOutcome { kFeasible, kInfeasible, kTimedOut };

struct CoverResult {
    CoverOutcome outcome = CoverOutcome::kInfeasible;
    std::vector<Index> centers;  // extra centers when feasible
    std::uint64_t nodes = 0;
};

// With outliers allowed: one search over the whole instance.
inline CoverResult solve_whole(const CoverInstance& inst, std::size_t budget, std::size_t xi_cap,
                               Clock::time_point deadline) {
    CoverResult out;
    CoverSearch search(inst, budget, xi_cap, deadline);
    if (auto [ok, picks] = search.greedy_cover(false, budget); ok) {
        out.outcome = CoverOutcome::kFeasible;
        out.centers = std::move(picks);
        return out;
    }
    if (search.lower_bound(static_cast<double>(budget + xi_cap) + 1.0) > budget + xi_cap) return out;
    if (auto [ok, picks] = search.greedy_cover(true, budget); ok) {
        out.outcome = CoverOutcome::kFeasible;
        out.centers = std::move(picks);
        return out;
    }
    if (auto h = search.heuristic_cover(); !h.empty() && h.size() <= budget) {
        out.outcome = CoverOutcome::kFeasible;
        out.centers = std::move(h);
        return out;
    }
    const auto outcome = search.run();
    out.nodes = search.nodes();
    if (outcome == CoverSearch::Outcome::kTimedOut) out.outcome = CoverOutcome::kTimedOut;
    if (outcome == CoverSearch::Outcome::kFound) {
        out.outcome = CoverOutcome::kFeasible;
        out.centers = search.solution();
    }
    return out;
}

// No outliers: components compete only for budget. Each component's minimum
// is bracketed by [lower bound, greedy cover size].
inline CoverResult solve_by_components(const CoverInstance& inst, std::size_t budget,
                                       Clock::time_point deadline) {
    CoverResult out;
    const auto parts = split_components(inst);
    struct PartState {
        std::size_t lb = 0;
        std::vector<Index> best;  // smallest cover found so far
    };
    std::vector<PartState> state(parts.size());
    std::size_t lb_total = 0, ub_total = 0;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        CoverSearch search(parts[p], parts[p].rows.size(), 0, deadline);
        auto [ok, picks] = search.greedy_cover(false, parts[p].rows.size());
        if (!ok) return out;  // a row nobody can cover
        state[p].best = std::move(picks);
        if (state[p].best.size() > 1) {
            state[p].lb = search.lower_bound(static_cast<double>(state[p].best.size()));
            if (auto [ok2, picks2] = search.greedy_cover(true, state[p].best.size() - 1); ok2)
                state[p].best = std::move(picks2);
            if (auto h = search.heuristic_cover(); !h.empty() && h.size() < state[p].best.size())
                state[p].best = std::move(h);
        }
        state[p].lb = std::clamp<std::size_t>(state[p].lb, 1, state[p].best.size());
        lb_total += state[p].lb;
        ub_total += state[p].best.size();
        if (lb_total > budget) return out;
    }

    if (ub_total > budget) {
        // Exact minima for all but the largest component, smallest first; the
        // largest then gets a single search with whatever budget is left.
        std::vector<std::size_t> order(parts.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](auto a, auto b) { return parts[a].rows.size() < parts[b].rows.size(); });
        const std::size_t last = order.back();
        order.pop_back();
        std::size_t spare = budget - lb_total;
        auto run = [&](std::size_t p, std::size_t k) {
            CoverSearch search(parts[p], k, 0, deadline);
            const auto outcome = search.run();
            out.nodes += search.nodes();
            if (outcome == CoverSearch::Outcome::kTimedOut) out.outcome = CoverOutcome::kTimedOut;
            if (outcome == CoverSearch::Outcome::kFound) state[p].best = search.solution();
            return outcome;
        };
        for (auto p : order) {
            auto& part = state[p];
            for (std::size_t k = part.lb; k < part.best.size() && k <= part.lb + spare; ++k) {
                const auto outcome = run(p, k);
                if (outcome == CoverSearch::Outcome::kTimedOut) return out;
                if (outcome == CoverSearch::Outcome::kFound) break;
            }
            if (part.best.size() > part.lb + spare) return out;
            spare -= part.best.size() - part.lb;
        }
        const std::size_t allowance = state[last].lb + spare;
        if (state[last].best.size() > allowance && run(last, allowance) != CoverSearch::Outcome::kFound)
            return out;
    }
    out.outcome = CoverOutcome::kFeasible;
    for (const auto& part : state) out.centers.insert(out.centers.end(), part.best.begin(), part.best.end());
    return out;
}

inline CoverResult solve_cover(const DistanceOracle& oracle, std::span<const Index> s0, double delta,
                               std::size_t budget, std::size_t xi_cap, double time_limit_s) {
    const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                             std::chrono::duration<double>(time_limit_s));
    auto inst = build_cover_instance(oracle, s0, delta);
    if (inst.rows.size() <= xi_cap) return {CoverOutcome::kFeasible, {}, 0};
    reduce(inst, xi_cap == 0);
    if (xi_cap == 0) return solve_by_components(inst, budget, deadline);
    return solve_whole(inst, budget, xi_cap, deadline);
}

}  // namespace coreset::detail
