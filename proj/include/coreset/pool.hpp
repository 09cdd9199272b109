#pragma once

#include "coreset/error.hpp"
#include "coreset/geometry.hpp"

#include <algorithm>
#include <span>
#include <vector>

namespace coreset {

// Partition of [n] into a labeled set, kept in labeling order, and the
// unlabeled remainder, kept ascending. Each call to label() is one round.
class PoolState {
  public:
    PoolState(std::size_t n, std::span<const Index> initial) : is_labeled_(n, 0) {
        require(n >= 1, ErrorCode::kInvalidArgument, "pool is empty");
        add(initial);
        history_.emplace_back(initial.begin(), initial.end());
        rebuild_unlabeled();
    }

    std::size_t size() const noexcept { return is_labeled_.size(); }
    std::size_t round() const noexcept { return history_.size() - 1; }
    const std::vector<Index>& labeled() const noexcept { return labeled_; }
    const std::vector<Index>& unlabeled() const noexcept { return unlabeled_; }
    bool is_labeled(Index i) const { return is_labeled_.at(i) != 0; }

    // history()[0] is the initial set, history()[k] the batch of round k.
    const std::vector<std::vector<Index>>& history() const noexcept { return history_; }

    void label(std::span<const Index> batch) {
        add(batch);
        history_.emplace_back(batch.begin(), batch.end());
        rebuild_unlabeled();
    }

  private:
    void add(std::span<const Index> batch) {
        std::vector<Index> sorted(batch.begin(), batch.end());
        std::sort(sorted.begin(), sorted.end());
        require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
                ErrorCode::kInvalidArgument, "batch repeats a point");
        for (Index i : sorted) {
            require(i < size(), ErrorCode::kOutOfRange, "pool index out of range");
            require(!is_labeled_[i], ErrorCode::kInvalidArgument, "point is already labeled");
        }
        for (Index i : batch) {
            is_labeled_[i] = 1;
            labeled_.push_back(i);
        }
    }

    void rebuild_unlabeled() {
        unlabeled_.clear();
        for (Index i = 0; i < size(); ++i)
            if (!is_labeled_[i]) unlabeled_.push_back(i);
    }

    std::vector<char> is_labeled_;
    std::vector<Index> labeled_;
    std::vector<Index> unlabeled_;
    std::vector<std::vector<Index>> history_;
};

}  // namespace coreset
