// oneblob.hpp — per-axis Gaussian bin activations over the normalized world
// box. No trainable parameters; gives the MLP heads multi-band positional
// context alongside the hash-grid features.

#pragma once

#include "sdfplan/core.hpp"

namespace sdfplan {

class OneBlobEncoder {
public:
    OneBlobEncoder(int bins, const Aabb& domain)
        : bins_(bins), domain_(domain), sigma_(1.0 / static_cast<double>(bins)) {
        if (bins < 1) throw InvalidInput("OneBlob bin count must be >= 1");
        if (!domain.valid()) throw InvalidInput("OneBlob domain is empty");
    }

    int bins() const { return bins_; }
    double sigma() const { return sigma_; }
    size_t output_width() const { return 3 * static_cast<size_t>(bins_); }

    // Writes 3*bins activations in [0, 1]; input is clamped to the domain.
    void encode(const Vec3& x, std::span<double> out) const {
        const Vec3 p = domain_.clamp(x);
        const Vec3 size = domain_.size();
        for (int axis = 0; axis < 3; ++axis) {
            const double u = size[axis] > 0.0 ? (p[axis] - domain_.min[axis]) / size[axis] : 0.5;
            for (int j = 0; j < bins_; ++j) {
                const double center = (j + 0.5) / static_cast<double>(bins_);
                const double t = (u - center) / sigma_;
                out[static_cast<size_t>(axis * bins_ + j)] = std::exp(-0.5 * t * t);
            }
        }
    }

private:
    int bins_;
    Aabb domain_;
    double sigma_;
};

} // namespace sdfplan
