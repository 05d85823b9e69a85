// hash_grid.hpp — multiresolution hash-grid encoder. Each level keeps a fixed
// table of `table_size` feature rows; levels coarse enough to fit densely are
// indexed without hashing, finer levels hash with the usual prime-XOR mix and
// accept collisions.

#pragma once

#include "sdfplan/core.hpp"

namespace sdfplan {

struct HashGridConfig {
    int levels = 8;
    int features_per_level = 2;
    int table_size_log2 = 15;
    int base_resolution = 4;
    double growth = 1.34;

    size_t table_size() const { return size_t{1} << table_size_log2; }
    size_t param_count() const {
        return static_cast<size_t>(levels) * table_size() *
               static_cast<size_t>(features_per_level);
    }
    size_t output_width() const {
        return static_cast<size_t>(levels) * static_cast<size_t>(features_per_level);
    }
};

class HashGridEncoder {
public:
    // One tape entry per (level, corner): base index of the touched feature
    // row and its trilinear weight. Backward is nonzero only on these rows.
    struct Touch {
        uint32_t level;
        size_t row_base; // index of the row's first parameter in params()
        double weight;
    };

    HashGridEncoder(const HashGridConfig& cfg, const Aabb& domain);

    const HashGridConfig& config() const { return cfg_; }
    const Aabb& domain() const { return domain_; }
    int level_resolution(int level) const { return resolutions_[static_cast<size_t>(level)]; }

    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }
    size_t param_count() const { return params_.size(); }
    size_t output_width() const { return cfg_.output_width(); }

    // Uniform init in +/- scale, deterministic under rng.
    void init_params(Rng& rng, double scale = 1e-4);

    void encode(const Vec3& x, std::span<double> out) const;
    void encode_with_tape(const Vec3& x, std::span<double> out, std::vector<Touch>& tape) const;

    // Accumulates d(loss)/d(params) += tape-weights x upstream into grad.
    void accumulate_gradient(std::span<const Touch> tape, std::span<const double> upstream,
                             std::span<double> grad) const;

    // Hash-mixing constants (fixed; part of the encoding definition).
    static constexpr uint32_t kPrimes[3] = {1u, 2654435761u, 805459861u};

private:
    size_t corner_row(int level, int64_t i, int64_t j, int64_t k) const;
    template <typename Fn>
    void walk_corners(const Vec3& x, Fn&& fn) const; // fn(level, row_base, weight)

    HashGridConfig cfg_;
    Aabb domain_;
    std::vector<int> resolutions_;
    std::vector<bool> dense_;
    std::vector<double> params_;
};

} // namespace sdfplan
