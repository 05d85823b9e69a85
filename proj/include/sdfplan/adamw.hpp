// adamw.hpp — AdamW with decoupled weight decay:
//   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2
//   p <- p - lr (m_hat / (sqrt(v_hat) + eps) + wd p)

#pragma once

#include "sdfplan/core.hpp"

namespace sdfplan {

struct AdamWParams {
    double lr = 3e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 1e-2;
};

class AdamW {
public:
    AdamW(size_t n, const AdamWParams& hp) : hp_(hp), m_(n, 0.0), v_(n, 0.0) {}

    const AdamWParams& hyperparams() const { return hp_; }
    long step_count() const { return step_; }
    size_t size() const { return m_.size(); }

    // Throws TrainingError on a non-finite gradient.
    void step(std::span<double> params, std::span<const double> grads) {
        if (params.size() != m_.size() || grads.size() != m_.size())
            throw InvalidInput("AdamW shape mismatch");
        ++step_;
        const double bc1 = 1.0 - std::pow(hp_.beta1, static_cast<double>(step_));
        const double bc2 = 1.0 - std::pow(hp_.beta2, static_cast<double>(step_));
        for (size_t i = 0; i < params.size(); ++i) {
            const double g = grads[i];
            if (!std::isfinite(g))
                throw TrainingError("non-finite gradient at parameter " + std::to_string(i));
            m_[i] = hp_.beta1 * m_[i] + (1.0 - hp_.beta1) * g;
            v_[i] = hp_.beta2 * v_[i] + (1.0 - hp_.beta2) * g * g;
            const double m_hat = m_[i] / bc1;
            const double v_hat = v_[i] / bc2;
            params[i] -= hp_.lr * (m_hat / (std::sqrt(v_hat) + hp_.eps) +
                                   hp_.weight_decay * params[i]);
        }
    }

private:
    AdamWParams hp_;
    std::vector<double> m_, v_;
    long step_ = 0;
};

} // namespace sdfplan
