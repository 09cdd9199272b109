#pragma once

// Central finite differences of the learner's training objective.

#include "coreset/learner.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace coreset::testing {

struct GradientCheck {
    double relative_error = 0.0;  // ||analytic - numeric|| / max(||analytic||, ||numeric||, 1e-12)
    std::size_t parameters = 0;
};

inline GradientCheck check_gradient(const SoftmaxModel& model, const FeatureSet& fs, double h = 1e-5) {
    const auto analytic = training_objective(model, fs);
    std::vector<double> a, num;
    SoftmaxModel probe = model;
    auto central = [&](double& param) {
        const double saved = param;
        param = saved + h;
        const double up = training_objective(probe, fs).value;
        param = saved - h;
        const double down = training_objective(probe, fs).value;
        param = saved;
        return (up - down) / (2.0 * h);
    };
    for (std::size_t k = 0; k < probe.weights().data.size(); ++k) {
        a.push_back(analytic.grad_weights.data[k]);
        num.push_back(central(probe.weights().data[k]));
    }
    for (std::size_t c = 0; c < probe.bias().size(); ++c) {
        a.push_back(analytic.grad_bias[c]);
        num.push_back(central(probe.bias()[c]));
    }
    double diff = 0.0, na = 0.0, nn = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        diff += (a[k] - num[k]) * (a[k] - num[k]);
        na += a[k] * a[k];
        nn += num[k] * num[k];
    }
    return {std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nn), 1e-12}), a.size()};
}

// Small labeled instance with random parameters away from zero.
struct GradientInstance {
    FeatureSet data;
    SoftmaxModel model;
};

inline GradientInstance random_gradient_instance(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick_n(3, 12), pick_d(1, 5), pick_c(2, 5);
    const std::size_t n = pick_n(rng), d = pick_d(rng);
    const auto C = static_cast<std::uint32_t>(pick_c(rng));
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<float> v(n * d);
    for (auto& x : v) x = static_cast<float>(g(rng));
    std::vector<Label> y(n);
    std::uniform_int_distribution<Label> pick_y(0, C - 1);
    for (auto& l : y) l = pick_y(rng);
    LearnerParams params;
    params.l2 = 0.1 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    SoftmaxModel model(C, d, params);
    for (auto& w : model.weights().data) w = g(rng);
    for (auto& b : model.bias()) b = g(rng);
    return {FeatureSet(n, d, std::move(v), std::move(y), C), std::move(model)};
}

}  // namespace coreset::testing
