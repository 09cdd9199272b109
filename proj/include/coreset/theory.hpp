#pragma once

#include "coreset/error.hpp"
#include "coreset/geometry.hpp"
#include "coreset/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace coreset {

// ||J||_F of the softmax Jacobian J = diag(p) - p p^T, evaluated at the
// output probabilities p.
inline double softmax_jacobian_frobenius(std::span<const double> p) {
    require(!p.empty(), ErrorCode::kInvalidArgument, "probability vector is empty");
    double sum = 0.0, sq = 0.0;
    for (double v : p) {
        require(v >= 0.0 && std::isfinite(v), ErrorCode::kInvalidArgument, "probabilities must be nonnegative");
        sum += v;
        sq += v * v;
    }
    require(std::abs(sum - 1.0) <= 1e-9, ErrorCode::kInvalidArgument, "probabilities must sum to 1");
    // sum_{i != j} p_i^2 p_j^2 = (sum p_i^2)^2 - sum p_i^4
    double total = sq * sq;
    for (double v : p) total += -v * v * v * v + v * v * (1.0 - v) * (1.0 - v);
    return std::sqrt(std::max(total, 0.0));
}

// ||J||_F at the uniform vector, sqrt(C - 1) / C. This is the maximum over
// the simplex only for C = 2; for C >= 3 the norm reaches 1/2 at
// p = (1/2, 1/2, 0, ...), and 1/2 is the supremum for every C.
inline double softmax_lipschitz_max(std::uint32_t num_classes) {
    require(num_classes >= 2, ErrorCode::kInvalidArgument, "need at least two classes");
    const double c = num_classes;
    return std::sqrt(c - 1.0) / c;
}

struct LipschitzSpec {
    double alpha = 1.0;  // max over neurons of the sum of |incoming weights|
    std::uint32_t conv_layers = 0;
    std::uint32_t fc_layers = 0;
    std::uint32_t num_classes = 2;
};

// Lipschitz constant of the class-probability map of a ReLU network with
// max-pooling: sqrt(C - 1) / C * alpha^(conv + fc).
inline double cnn_lipschitz_constant(const LipschitzSpec& spec) {
    require(spec.alpha >= 0.0, ErrorCode::kInvalidArgument, "alpha must be >= 0");
    return softmax_lipschitz_max(spec.num_classes) *
           std::pow(spec.alpha, static_cast<double>(spec.conv_layers + spec.fc_layers));
}

// Layers are (outputs x inputs); row sums of |w| are per-neuron input mass.
inline double alpha_from_weights(std::span<const Matrix> layers) {
    require(!layers.empty(), ErrorCode::kInvalidArgument, "no layers given");
    double alpha = 0.0;
    for (const auto& w : layers) {
        for (std::size_t r = 0; r < w.rows; ++r) {
            double mass = 0.0;
            for (double v : w.row(r)) mass += std::abs(v);
            alpha = std::max(alpha, mass);
        }
    }
    return alpha;
}

struct BoundInputs {
    double delta = 0.0;       // cover radius of the labeled set
    double lambda_l = 0.0;    // Lipschitz constant of the loss in x
    double lambda_eta = 0.0;  // Lipschitz constant of the regression functions
    double loss_bound = 0.0;  // L
    std::uint32_t num_classes = 2;
    std::size_t n = 1;
    double gamma = 0.05;  // failure probability
};

struct BoundTerms {
    double cover = 0.0;      // delta * (lambda_l + lambda_eta * L * C)
    double hoeffding = 0.0;  // sqrt(L^2 log(1/gamma) / (2n))
    double total = 0.0;
};

inline BoundTerms bound_terms(const BoundInputs& in) {
    require(in.gamma > 0.0, ErrorCode::kInvalidArgument, "gamma must be > 0");
    require(in.gamma <= 1.0, ErrorCode::kInvalidArgument, "gamma must be <= 1");
    require(in.n >= 1, ErrorCode::kInvalidArgument, "n must be >= 1");
    require(in.delta >= 0.0 && in.lambda_l >= 0.0 && in.lambda_eta >= 0.0 && in.loss_bound >= 0.0,
            ErrorCode::kInvalidArgument, "bound inputs must be nonnegative");
    BoundTerms t;
    const double L = in.loss_bound;
    t.cover = in.delta * (in.lambda_l + in.lambda_eta * L * static_cast<double>(in.num_classes));
    t.hoeffding = std::sqrt(L * L * std::log(1.0 / in.gamma) / (2.0 * static_cast<double>(in.n)));
    t.total = t.cover + t.hoeffding;
    return t;
}

// High-probability bound on the core-set loss of a labeled set that is a
// delta-cover of the data and has zero training loss.
inline double coverage_bound(const BoundInputs& in) { return bound_terms(in).total; }

// |mean loss over all points - mean loss over the points of s|.
inline double coreset_loss(std::span<const double> losses, std::span<const Index> s) {
    require(!s.empty(), ErrorCode::kInvalidArgument, "subset is empty");
    require(!losses.empty(), ErrorCode::kInvalidArgument, "loss vector is empty");
    double all = 0.0, sub = 0.0;
    for (double v : losses) all += v;
    for (Index i : s) {
        require(i < losses.size(), ErrorCode::kOutOfRange, "subset index out of range");
        sub += losses[i];
    }
    return std::abs(all / static_cast<double>(losses.size()) - sub / static_cast<double>(s.size()));
}

// Empirical lower estimate of the loss Lipschitz constant: the largest
// |l_i - l_j| / ||x_i - x_j|| over `pairs` random same-label pairs (pairs at
// distance zero are skipped).
inline double estimate_loss_lipschitz(const FeatureSet& fs, std::span<const double> losses,
                                      std::size_t pairs, std::uint64_t seed) {
    require(losses.size() == fs.size(), ErrorCode::kInvalidArgument, "need one loss per point");
    const auto labels = fs.labels();
    std::vector<std::vector<Index>> by_class(fs.num_classes());
    for (Index i = 0; i < fs.size(); ++i) by_class[labels[i]].push_back(i);
    std::vector<std::uint32_t> classes;
    for (std::uint32_t c = 0; c < by_class.size(); ++c)
        if (by_class[c].size() >= 2) classes.push_back(c);
    if (classes.empty()) return 0.0;

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick_class(0, classes.size() - 1);
    double best = 0.0;
    for (std::size_t t = 0; t < pairs; ++t) {
        const auto& members = by_class[classes[pick_class(rng)]];
        std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
        const Index a = members[pick(rng)], b = members[pick(rng)];
        const double d = l2_distance(fs.row(a), fs.row(b));
        if (d > 0.0) best = std::max(best, std::abs(losses[a] - losses[b]) / d);
    }
    return best;
}

}  // namespace coreset
