#pragma once

#include "coreset/error.hpp"
#include "coreset/geometry.hpp"
#include "coreset/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace coreset {

struct LearnerParams {
    double learning_rate = 0.1;
    int epochs = 500;
    double l2 = 1e-4;  // penalty (l2 / 2) * ||W||^2, bias unpenalized
    std::uint64_t seed = 0;
};

// Multinomial logistic regression: p(y = c | x) = softmax(W x + b)_c.
class SoftmaxModel {
  public:
    SoftmaxModel() = default;
    SoftmaxModel(std::uint32_t num_classes, std::size_t dim, LearnerParams params = {})
        : weights_(num_classes, dim), bias_(num_classes, 0.0), params_(params) {
        require(num_classes >= 1 && dim >= 1, ErrorCode::kInvalidArgument,
                "model needs at least one class and one dimension");
    }

    std::uint32_t num_classes() const noexcept { return static_cast<std::uint32_t>(weights_.rows); }
    std::size_t dim() const noexcept { return weights_.cols; }
    const LearnerParams& params() const noexcept { return params_; }

    Matrix& weights() noexcept { return weights_; }
    const Matrix& weights() const noexcept { return weights_; }
    std::vector<double>& bias() noexcept { return bias_; }
    const std::vector<double>& bias() const noexcept { return bias_; }

    template <class T>
    void logits(std::span<const T> x, std::span<double> out) const noexcept {
        for (std::size_t c = 0; c < weights_.rows; ++c) {
            const auto w = weights_.row(c);
            double z = bias_[c];
            for (std::size_t k = 0; k < x.size(); ++k) z += w[k] * static_cast<double>(x[k]);
            out[c] = z;
        }
    }

    friend bool operator==(const SoftmaxModel& a, const SoftmaxModel& b) {
        return a.weights_ == b.weights_ && a.bias_ == b.bias_;
    }

  private:
    Matrix weights_;
    std::vector<double> bias_;
    LearnerParams params_;
};

// In place, with the max subtracted first so large logits cannot overflow.
inline void softmax_inplace(std::span<double> z) noexcept {
    const double top = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (auto& v : z) {
        v = std::exp(v - top);
        sum += v;
    }
    for (auto& v : z) v /= sum;
}

namespace detail {

inline void check_dims(const SoftmaxModel& model, const FeatureSet& fs) {
    require(model.dim() == fs.dim(), ErrorCode::kInvalidArgument, "feature dimension does not match model");
}

inline std::vector<double> to_double(const FeatureSet& fs) {
    return {fs.values().begin(), fs.values().end()};
}

}  // namespace detail

struct Objective {
    double value = 0.0;
    Matrix grad_weights;
    std::vector<double> grad_bias;
};

// Mean cross-entropy over `fs` plus the l2 penalty, with its exact gradient.
inline Objective training_objective(const SoftmaxModel& model, const FeatureSet& fs) {
    detail::check_dims(model, fs);
    const auto labels = fs.labels();
    const std::size_t n = fs.size(), d = fs.dim(), C = model.num_classes();
    require(std::all_of(labels.begin(), labels.end(), [&](Label y) { return y < C; }),
            ErrorCode::kInvalidArgument, "label outside model classes");

    Objective out{0.0, Matrix(C, d), std::vector<double>(C, 0.0)};
    std::vector<double> p(C);
    for (Index i = 0; i < n; ++i) {
        const auto x = fs.row(i);
        model.logits(x, std::span<double>(p));
        softmax_inplace(p);
        out.value -= std::log(std::max(p[labels[i]], 1e-300));
        p[labels[i]] -= 1.0;
        for (std::size_t c = 0; c < C; ++c) {
            auto g = out.grad_weights.row(c);
            for (std::size_t k = 0; k < d; ++k) g[k] += p[c] * static_cast<double>(x[k]);
            out.grad_bias[c] += p[c];
        }
    }
    const double inv = 1.0 / static_cast<double>(n);
    out.value *= inv;
    for (auto& g : out.grad_weights.data) g *= inv;
    for (auto& g : out.grad_bias) g *= inv;

    const double l2 = model.params().l2;
    double sq = 0.0;
    for (std::size_t k = 0; k < out.grad_weights.data.size(); ++k) {
        const double w = model.weights().data[k];
        sq += w * w;
        out.grad_weights.data[k] += l2 * w;
    }
    out.value += 0.5 * l2 * sq;
    return out;
}

// Full-batch gradient descent from zero parameters. `history`, if given,
// receives the training objective before every step and after the last one.
inline SoftmaxModel fit(const FeatureSet& labeled, LearnerParams params = {},
                        std::vector<double>* history = nullptr) {
    const auto labels = labeled.labels();
    require(labeled.num_classes() >= 1, ErrorCode::kInvalidArgument, "labeled set has no classes");
    require(params.epochs >= 0 && params.learning_rate > 0.0 && params.l2 >= 0.0,
            ErrorCode::kInvalidArgument, "invalid learner hyperparameters");

    const std::size_t n = labeled.size(), d = labeled.dim(), C = labeled.num_classes();
    SoftmaxModel model(labeled.num_classes(), d, params);
    const auto x = detail::to_double(labeled);
    const double inv = 1.0 / static_cast<double>(n);

    Matrix grad(C, d);
    std::vector<double> grad_b(C), p(C);
    auto& w = model.weights();
    auto& b = model.bias();
    for (int epoch = 0; epoch <= params.epochs; ++epoch) {
        std::fill(grad.data.begin(), grad.data.end(), 0.0);
        std::fill(grad_b.begin(), grad_b.end(), 0.0);
        double loss = 0.0;
        for (Index i = 0; i < n; ++i) {
            const std::span<const double> xi(x.data() + i * d, d);
            model.logits(xi, std::span<double>(p));
            softmax_inplace(p);
            if (history) loss -= std::log(std::max(p[labels[i]], 1e-300));
            p[labels[i]] -= 1.0;
            for (std::size_t c = 0; c < C; ++c) {
                if (p[c] == 0.0) continue;
                auto g = grad.row(c);
                for (std::size_t k = 0; k < d; ++k) g[k] += p[c] * xi[k];
                grad_b[c] += p[c];
            }
        }
        if (history) {
            double sq = 0.0;
            for (double v : w.data) sq += v * v;
            history->push_back(loss * inv + 0.5 * params.l2 * sq);
        }
        if (epoch == params.epochs) break;
        for (std::size_t k = 0; k < w.data.size(); ++k)
            w.data[k] -= params.learning_rate * (grad.data[k] * inv + params.l2 * w.data[k]);
        for (std::size_t c = 0; c < C; ++c) b[c] -= params.learning_rate * grad_b[c] * inv;
    }
    return model;
}

// n x C class probabilities.
inline Matrix predict_proba(const SoftmaxModel& model, const FeatureSet& fs) {
    detail::check_dims(model, fs);
    Matrix out(fs.size(), model.num_classes());
    for (Index i = 0; i < fs.size(); ++i) {
        model.logits(fs.row(i), out.row(i));
        softmax_inplace(out.row(i));
    }
    return out;
}

// Logits as a new feature space, labels carried along.
inline FeatureSet logit_embedding(const SoftmaxModel& model, const FeatureSet& fs) {
    detail::check_dims(model, fs);
    const std::size_t C = model.num_classes();
    std::vector<float> values(fs.size() * C);
    std::vector<double> z(C);
    for (Index i = 0; i < fs.size(); ++i) {
        model.logits(fs.row(i), std::span<double>(z));
        for (std::size_t c = 0; c < C; ++c) values[i * C + c] = static_cast<float>(z[c]);
    }
    std::optional<std::vector<Label>> labels;
    if (fs.has_labels()) labels.emplace(fs.labels().begin(), fs.labels().end());
    return FeatureSet(fs.size(), C, std::move(values), std::move(labels), fs.num_classes());
}

enum class LossKind { kCrossEntropy, kL2 };

struct LossVector {
    LossKind kind = LossKind::kCrossEntropy;
    std::vector<double> values;
    // Largest attainable value: sqrt(2) for the l2 kind, unbounded otherwise.
    double bound = std::numeric_limits<double>::infinity();
};

inline LossVector point_losses(const Matrix& probs, std::span<const Label> labels, LossKind kind) {
    require(labels.size() == probs.rows, ErrorCode::kInvalidArgument, "label count does not match rows");
    LossVector out;
    out.kind = kind;
    out.values.resize(probs.rows);
    if (kind == LossKind::kL2) out.bound = std::sqrt(2.0);
    for (Index i = 0; i < probs.rows; ++i) {
        const auto p = probs.row(i);
        const Label y = labels[i];
        require(y < probs.cols, ErrorCode::kInvalidArgument, "label outside model classes");
        if (kind == LossKind::kCrossEntropy) {
            out.values[i] = -std::log(std::max(p[y], 1e-12));
        } else {
            double sq = 0.0;
            for (std::size_t c = 0; c < p.size(); ++c) {
                const double diff = p[c] - (c == y ? 1.0 : 0.0);
                sq += diff * diff;
            }
            out.values[i] = std::sqrt(sq);
        }
    }
    return out;
}

inline LossVector point_losses(const SoftmaxModel& model, const FeatureSet& fs, LossKind kind) {
    return point_losses(predict_proba(model, fs), fs.labels(), kind);
}

inline double mean(std::span<const double> values) {
    require(!values.empty(), ErrorCode::kInvalidArgument, "mean of an empty sequence");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

// Argmax with ties to the smallest class index.
inline Label predict_class(std::span<const double> p) noexcept {
    return static_cast<Label>(std::max_element(p.begin(), p.end()) - p.begin());
}

inline double accuracy(const Matrix& probs, std::span<const Label> labels) {
    require(labels.size() == probs.rows && !labels.empty(), ErrorCode::kInvalidArgument,
            "label count does not match rows");
    std::size_t hits = 0;
    for (Index i = 0; i < probs.rows; ++i) hits += predict_class(probs.row(i)) == labels[i];
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

inline double accuracy(const SoftmaxModel& model, const FeatureSet& fs) {
    return accuracy(predict_proba(model, fs), fs.labels());
}

}  // namespace coreset
