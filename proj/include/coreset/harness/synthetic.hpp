#pragma once

#include "coreset/error.hpp"
#include "coreset/geometry.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace coreset::harness {

struct SyntheticSpec {
    std::uint32_t num_classes = 10;
    std::size_t per_class = 100;
    std::size_t dim = 2;
    double spread = 1.0;  // isotropic standard deviation around each class mean
    std::uint64_t seed = 0;
};

struct SyntheticData {
    FeatureSet features;
    std::vector<std::vector<double>> means;  // one per class
};

// Isotropic Gaussian mixture, one component per class. Class means are drawn
// from N(0, I); rows are shuffled so that any contiguous split mixes classes.
inline SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    require(spec.num_classes >= 1 && spec.per_class >= 1 && spec.dim >= 1,
            ErrorCode::kInvalidArgument, "synthetic counts must be positive");
    require(spec.spread >= 0.0, ErrorCode::kInvalidArgument, "spread must be >= 0");

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<double>> means(spec.num_classes, std::vector<double>(spec.dim));
    for (auto& m : means)
        for (auto& v : m) v = gauss(rng);

    const std::size_t n = spec.num_classes * spec.per_class;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<float> values(n * spec.dim);
    std::vector<Label> labels(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto cls = static_cast<Label>(k / spec.per_class);
        const std::size_t row = order[k];
        labels[row] = cls;
        for (std::size_t j = 0; j < spec.dim; ++j)
            values[row * spec.dim + j] = static_cast<float>(means[cls][j] + spec.spread * gauss(rng));
    }
    return {FeatureSet(n, spec.dim, std::move(values), std::move(labels), spec.num_classes),
            std::move(means)};
}

}  // namespace coreset::harness
