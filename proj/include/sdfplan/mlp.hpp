// mlp.hpp — dense scalar-output MLP with softplus hidden activations and an
// identity output layer, plus exact reverse-mode gradients. Sized for the
// sub-thousand-parameter heads this toolkit trains per observation.

#pragma once

#include "sdfplan/core.hpp"

namespace sdfplan {

// Scratch buffers for one forward/backward pair; reuse across calls to avoid
// per-sample allocation in training loops.
struct MlpWorkspace {
    std::vector<double> input;       // copy of the feature vector
    std::vector<double> pre;         // pre-activations, all layers concatenated
    std::vector<double> act;         // post-activations, all layers concatenated
    std::vector<double> delta;       // backprop scratch
};

class MlpHead {
public:
    // widths = [input, hidden..., 1]
    explicit MlpHead(std::vector<int> widths);

    // Builds a 3-layer head (two hidden layers) whose exact parameter count
    // equals `target`, found by integer search over hidden widths; prefers
    // balanced layers. Throws InvalidInput when no exact solution exists.
    static MlpHead with_param_target(int input_width, int target);

    const std::vector<int>& widths() const { return widths_; }
    int input_width() const { return widths_.front(); }
    size_t param_count() const { return params_.size(); }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    // Uniform +/- 1/sqrt(fan_in) per layer, deterministic under rng.
    void init_params(Rng& rng);

    double forward(std::span<const double> features) const;
    double forward_cached(std::span<const double> features, MlpWorkspace& ws) const;

    // Accumulates gradients (+=) of upstream * output into grad_params and,
    // when non-empty, grad_features. Requires the workspace of the matching
    // forward_cached call; delta is used as scratch.
    void backward(MlpWorkspace& ws, double upstream, std::span<double> grad_params,
                  std::span<double> grad_features) const;

    static double softplus(double z) {
        return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    }
    static double sigmoid(double z) {
        return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    }

private:
    size_t layer_count() const { return widths_.size() - 1; }

    std::vector<int> widths_;
    std::vector<size_t> layer_offsets_; // start of each layer's W block in params_
    std::vector<size_t> act_offsets_;   // start of each layer's outputs in pre/act
    size_t act_total_ = 0;
    std::vector<double> params_;
};

} // namespace sdfplan
