#include "sdfplan/mlp.hpp"

namespace sdfplan {

MlpHead::MlpHead(std::vector<int> widths) : widths_(std::move(widths)) {
    if (widths_.size() < 2) throw InvalidInput("MLP needs at least one layer");
    if (widths_.back() != 1) throw InvalidInput("MLP output width must be 1");
    for (int w : widths_)
        if (w < 1) throw InvalidInput("MLP layer widths must be positive");
    size_t total = 0;
    for (size_t l = 0; l + 1 < widths_.size(); ++l) {
        layer_offsets_.push_back(total);
        total += static_cast<size_t>(widths_[l]) * static_cast<size_t>(widths_[l + 1]) +
                 static_cast<size_t>(widths_[l + 1]);
        act_offsets_.push_back(act_total_);
        act_total_ += static_cast<size_t>(widths_[l + 1]);
    }
    params_.assign(total, 0.0);
}

MlpHead MlpHead::with_param_target(int input_width, int target) {
    // params(h1, h2) = in*h1 + h1 + h1*h2 + h2 + h2 + 1
    int best_h1 = -1, best_h2 = -1;
    for (int h1 = 1; h1 <= 256; ++h1) {
        for (int h2 = 1; h2 <= 256; ++h2) {
            const int p = input_width * h1 + h1 + h1 * h2 + h2 + h2 + 1;
            if (p != target) continue;
            if (best_h1 < 0 || std::abs(h1 - h2) < std::abs(best_h1 - best_h2) ||
                (std::abs(h1 - h2) == std::abs(best_h1 - best_h2) && h1 < best_h1)) {
                best_h1 = h1;
                best_h2 = h2;
            }
        }
    }
    if (best_h1 < 0)
        throw InvalidInput("no 3-layer head with exactly " + std::to_string(target) +
                           " parameters for input width " + std::to_string(input_width));
    return MlpHead({input_width, best_h1, best_h2, 1});
}

void MlpHead::init_params(Rng& rng) {
    for (size_t l = 0; l + 1 < widths_.size(); ++l) {
        const auto fan_in = static_cast<size_t>(widths_[l]);
        const auto fan_out = static_cast<size_t>(widths_[l + 1]);
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        double* w = params_.data() + layer_offsets_[l];
        for (size_t i = 0; i < fan_in * fan_out + fan_out; ++i) w[i] = rng.uniform(-bound, bound);
    }
}

double MlpHead::forward(std::span<const double> features) const {
    thread_local MlpWorkspace ws;
    return forward_cached(features, ws);
}

double MlpHead::forward_cached(std::span<const double> features, MlpWorkspace& ws) const {
    if (features.size() < static_cast<size_t>(widths_.front()))
        throw InvalidInput("feature vector shorter than MLP input width");
    ws.input.assign(features.begin(), features.begin() + widths_.front());
    ws.pre.resize(act_total_);
    ws.act.resize(act_total_);
    const double* cur = ws.input.data();
    for (size_t l = 0; l + 1 < widths_.size(); ++l) {
        const auto n_in = static_cast<size_t>(widths_[l]);
        const auto n_out = static_cast<size_t>(widths_[l + 1]);
        const double* w = params_.data() + layer_offsets_[l];
        const double* bias = w + n_in * n_out;
        double* pre = ws.pre.data() + act_offsets_[l];
        double* act = ws.act.data() + act_offsets_[l];
        const bool last = l + 2 == widths_.size();
        for (size_t o = 0; o < n_out; ++o) {
            double z = bias[o];
            const double* row = w + o * n_in;
            for (size_t i = 0; i < n_in; ++i) z += row[i] * cur[i];
            pre[o] = z;
            act[o] = last ? z : softplus(z);
        }
        cur = act;
    }
    return ws.act[act_offsets_.back()];
}

void MlpHead::backward(MlpWorkspace& ws, double upstream, std::span<double> grad_params,
                       std::span<double> grad_features) const {
    ws.delta.resize(act_total_);
    const auto n_layers = layer_count();
    // Seed the output delta and walk layers backwards.
    ws.delta[act_offsets_.back()] = upstream;
    for (size_t l = n_layers; l-- > 0;) {
        const auto n_in = static_cast<size_t>(widths_[l]);
        const auto n_out = static_cast<size_t>(widths_[l + 1]);
        const double* w = params_.data() + layer_offsets_[l];
        const double* in_act = l == 0 ? ws.input.data() : ws.act.data() + act_offsets_[l - 1];
        const double* delta = ws.delta.data() + act_offsets_[l];
        double* gw = grad_params.data() + layer_offsets_[l];
        double* gb = gw + n_in * n_out;
        for (size_t o = 0; o < n_out; ++o) {
            const double d = delta[o];
            gb[o] += d;
            double* grow = gw + o * n_in;
            for (size_t i = 0; i < n_in; ++i) grow[i] += d * in_act[i];
        }
        // Propagate to the layer input: delta_in = W^T delta, times softplus'.
        if (l > 0) {
            double* delta_in = ws.delta.data() + act_offsets_[l - 1];
            const double* pre_in = ws.pre.data() + act_offsets_[l - 1];
            for (size_t i = 0; i < n_in; ++i) {
                double acc = 0.0;
                for (size_t o = 0; o < n_out; ++o) acc += w[o * n_in + i] * delta[o];
                delta_in[i] = acc * sigmoid(pre_in[i]);
            }
        } else if (!grad_features.empty()) {
            for (size_t i = 0; i < n_in; ++i) {
                double acc = 0.0;
                for (size_t o = 0; o < n_out; ++o) acc += w[o * n_in + i] * delta[o];
                grad_features[i] += acc;
            }
        }
    }
}

} // namespace sdfplan
