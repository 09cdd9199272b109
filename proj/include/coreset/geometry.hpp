#pragma once

#include "coreset/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace coreset {

using Index = std::size_t;
using Label = std::uint32_t;

// n points in d dimensions, optionally labeled with classes {0, ..., C-1}.
// Values are held in single precision (the on-disk format); every derived
// quantity is computed in double.
class FeatureSet {
  public:
    FeatureSet() = default;

    FeatureSet(std::size_t n, std::size_t d, std::vector<float> values,
               std::optional<std::vector<Label>> labels, std::uint32_t num_classes)
        : n_(n), d_(d), values_(std::move(values)), labels_(std::move(labels)),
          num_classes_(num_classes) {
        validate();
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t dim() const noexcept { return d_; }
    std::uint32_t num_classes() const noexcept { return num_classes_; }
    bool has_labels() const noexcept { return labels_.has_value(); }

    std::span<const float> row(Index i) const { return {values_.data() + i * d_, d_}; }
    std::span<const float> values() const noexcept { return values_; }

    std::span<const Label> labels() const {
        require(labels_.has_value(), ErrorCode::kInvalidArgument, "feature set has no labels");
        return *labels_;
    }

    // Rows `indices` in the given order, labels carried along.
    FeatureSet subset(std::span<const Index> indices) const {
        std::vector<float> values;
        values.reserve(indices.size() * d_);
        std::optional<std::vector<Label>> labels;
        if (labels_) labels.emplace();
        for (Index i : indices) {
            require(i < n_, ErrorCode::kOutOfRange, "subset index out of range");
            auto r = row(i);
            values.insert(values.end(), r.begin(), r.end());
            if (labels) labels->push_back((*labels_)[i]);
        }
        return FeatureSet(indices.size(), d_, std::move(values), std::move(labels), num_classes_);
    }

    friend bool operator==(const FeatureSet&, const FeatureSet&) = default;

  private:
    void validate() const {
        require(n_ >= 1 && d_ >= 1, ErrorCode::kInvalidArgument, "feature set needs n >= 1 and d >= 1");
        require(values_.size() == n_ * d_, ErrorCode::kInvalidArgument, "feature matrix size mismatch");
        for (float v : values_)
            require(std::isfinite(v), ErrorCode::kInvalidArgument, "non-finite feature value");
        if (labels_) {
            require(labels_->size() == n_, ErrorCode::kInvalidArgument, "label count mismatch");
            for (Label y : *labels_)
                require(y < num_classes_, ErrorCode::kInvalidArgument, "label >= num_classes");
        }
    }

    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<float> values_;
    std::optional<std::vector<Label>> labels_;
    std::uint32_t num_classes_ = 0;
};

// Per-dimension zero-mean / unit-variance rescaling. Constant columns are only
// centered. Off by default everywhere; raw features are the metric space.
inline FeatureSet standardize(const FeatureSet& fs) {
    const std::size_t n = fs.size(), d = fs.dim();
    std::vector<double> mean(d, 0.0), var(d, 0.0);
    for (Index i = 0; i < n; ++i) {
        auto r = fs.row(i);
        for (std::size_t k = 0; k < d; ++k) mean[k] += r[k];
    }
    for (auto& m : mean) m /= static_cast<double>(n);
    for (Index i = 0; i < n; ++i) {
        auto r = fs.row(i);
        for (std::size_t k = 0; k < d; ++k) var[k] += (r[k] - mean[k]) * (r[k] - mean[k]);
    }
    std::vector<float> values(n * d);
    for (Index i = 0; i < n; ++i) {
        auto r = fs.row(i);
        for (std::size_t k = 0; k < d; ++k) {
            const double sd = std::sqrt(var[k] / static_cast<double>(n));
            const double centered = r[k] - mean[k];
            values[i * d + k] = static_cast<float>(sd > 0.0 ? centered / sd : centered);
        }
    }
    std::optional<std::vector<Label>> labels;
    if (fs.has_labels()) labels.emplace(fs.labels().begin(), fs.labels().end());
    return FeatureSet(n, d, std::move(values), std::move(labels), fs.num_classes());
}

// Summation order is fixed (dimension order) and (a-b)^2 == (b-a)^2 in IEEE
// arithmetic, so l2_distance(a, b) and l2_distance(b, a) are bitwise equal.
inline double l2_distance(std::span<const float> a, std::span<const float> b) noexcept {
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = static_cast<double>(a[k]) - static_cast<double>(b[k]);
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

struct OracleOptions {
    // Full n x n matrix is cached only when n <= cache_threshold.
    std::size_t cache_threshold = 8192;
};

// Pairwise l2 distances over a FeatureSet plus the running distance from every
// point to its nearest current center. The FeatureSet must outlive the oracle.
//
// Copies share the (immutable) distance cache and own their min_dist, so a
// solver can take a private working copy of a shared oracle cheaply. Reads are
// const and safe to share; add_center()/reset() mutate min_dist and must be
// serialized by the caller.
class DistanceOracle {
  public:
    explicit DistanceOracle(const FeatureSet& features, OracleOptions options = {})
        : storage_(std::make_shared<Storage>()),
          min_dist_(features.size(), std::numeric_limits<double>::infinity()) {
        storage_->features = &features;
        const std::size_t n = features.size();
        if (n <= options.cache_threshold) {
            auto& m = storage_->matrix;
            m.assign(n * n, 0.0);
            for (Index i = 0; i < n; ++i)
                for (Index j = i + 1; j < n; ++j) m[i * n + j] = m[j * n + i] = compute(i, j);
        }
    }

    std::size_t size() const noexcept { return min_dist_.size(); }
    bool cached() const noexcept { return !storage_->matrix.empty(); }
    const FeatureSet& features() const noexcept { return *storage_->features; }

    double distance(Index i, Index j) const {
        require(i < size() && j < size(), ErrorCode::kOutOfRange, "distance index out of range");
        return distance_unchecked(i, j);
    }

    double distance_unchecked(Index i, Index j) const noexcept {
        if (cached()) return storage_->matrix[i * size() + j];
        return i == j ? 0.0 : compute(i, j);
    }

    // The on-demand route, regardless of caching.
    double compute(Index i, Index j) const noexcept {
        return l2_distance(storage_->features->row(i), storage_->features->row(j));
    }

    void add_center(Index c) {
        require(c < size(), ErrorCode::kOutOfRange, "center index out of range");
        for (Index i = 0; i < size(); ++i)
            min_dist_[i] = std::min(min_dist_[i], distance_unchecked(i, c));
        centers_.push_back(c);
    }

    void reset() {
        std::fill(min_dist_.begin(), min_dist_.end(), std::numeric_limits<double>::infinity());
        centers_.clear();
    }

    // Same distances, no centers.
    DistanceOracle fresh() const {
        DistanceOracle copy(*this);
        copy.reset();
        return copy;
    }

    std::span<const double> min_dist() const noexcept { return min_dist_; }
    const std::vector<Index>& centers() const noexcept { return centers_; }

  private:
    struct Storage {
        const FeatureSet* features = nullptr;
        std::vector<double> matrix;
    };

    std::shared_ptr<Storage> storage_;
    std::vector<double> min_dist_;
    std::vector<Index> centers_;
};

// Distance from every point to its nearest member of `centers`.
inline std::vector<double> nearest_center_distances(const DistanceOracle& oracle,
                                                    std::span<const Index> centers) {
    require(!centers.empty(), ErrorCode::kInvalidArgument, "center set is empty");
    std::vector<double> out(oracle.size(), std::numeric_limits<double>::infinity());
    for (Index c : centers) {
        require(c < oracle.size(), ErrorCode::kOutOfRange, "center index out of range");
        for (Index i = 0; i < oracle.size(); ++i)
            out[i] = std::min(out[i], oracle.distance_unchecked(i, c));
    }
    return out;
}

// max_i min_{c in centers} dist(i, c)
inline double cover_radius(const DistanceOracle& oracle, std::span<const Index> centers) {
    const auto dist = nearest_center_distances(oracle, centers);
    return *std::max_element(dist.begin(), dist.end());
}

}  // namespace coreset
