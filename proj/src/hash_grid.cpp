#include "sdfplan/hash_grid.hpp"

namespace sdfplan {

HashGridEncoder::HashGridEncoder(const HashGridConfig& cfg, const Aabb& domain)
    : cfg_(cfg), domain_(domain) {
    if (cfg.levels < 1 || cfg.features_per_level < 1 || cfg.base_resolution < 1 ||
        cfg.growth <= 0.0 || cfg.table_size_log2 < 1)
        throw InvalidInput("invalid hash-grid configuration");
    if (!domain.valid()) throw InvalidInput("hash-grid domain is empty");
    resolutions_.resize(static_cast<size_t>(cfg.levels));
    dense_.resize(static_cast<size_t>(cfg.levels));
    double scale = static_cast<double>(cfg.base_resolution);
    for (int l = 0; l < cfg.levels; ++l) {
        const int res = std::max(1, static_cast<int>(std::floor(scale)));
        resolutions_[static_cast<size_t>(l)] = res;
        const auto corners = static_cast<size_t>(res + 1);
        dense_[static_cast<size_t>(l)] = corners * corners * corners <= cfg.table_size();
        scale *= cfg.growth;
    }
    params_.assign(cfg.param_count(), 0.0);
}

void HashGridEncoder::init_params(Rng& rng, double scale) {
    for (double& p : params_) p = rng.uniform(-scale, scale);
}

size_t HashGridEncoder::corner_row(int level, int64_t i, int64_t j, int64_t k) const {
    const size_t table = cfg_.table_size();
    size_t idx;
    if (dense_[static_cast<size_t>(level)]) {
        const auto n1 = static_cast<size_t>(resolutions_[static_cast<size_t>(level)] + 1);
        idx = (static_cast<size_t>(i) * n1 + static_cast<size_t>(j)) * n1 + static_cast<size_t>(k);
    } else {
        const uint32_t h = static_cast<uint32_t>(i) * kPrimes[0] ^
                           static_cast<uint32_t>(j) * kPrimes[1] ^
                           static_cast<uint32_t>(k) * kPrimes[2];
        idx = h & (table - 1);
    }
    const size_t level_offset =
        static_cast<size_t>(level) * table * static_cast<size_t>(cfg_.features_per_level);
    return level_offset + idx * static_cast<size_t>(cfg_.features_per_level);
}

template <typename Fn>
void HashGridEncoder::walk_corners(const Vec3& x, Fn&& fn) const {
    const Vec3 p = domain_.clamp(x);
    const Vec3 size = domain_.size();
    Vec3 u; // normalized coordinates in [0, 1]
    for (int a = 0; a < 3; ++a) u[a] = size[a] > 0.0 ? (p[a] - domain_.min[a]) / size[a] : 0.0;

    for (int l = 0; l < cfg_.levels; ++l) {
        const double res = resolutions_[static_cast<size_t>(l)];
        int64_t base[3];
        double frac[3];
        for (int a = 0; a < 3; ++a) {
            const double pos = u[a] * res;
            int64_t i0 = static_cast<int64_t>(std::floor(pos));
            i0 = std::min<int64_t>(std::max<int64_t>(i0, 0),
                                   static_cast<int64_t>(res) - 1);
            base[a] = i0;
            frac[a] = pos - static_cast<double>(i0);
        }
        for (int c = 0; c < 8; ++c) {
            const int dx = (c >> 2) & 1, dy = (c >> 1) & 1, dz = c & 1;
            const double w = (dx ? frac[0] : 1.0 - frac[0]) * (dy ? frac[1] : 1.0 - frac[1]) *
                             (dz ? frac[2] : 1.0 - frac[2]);
            fn(l, corner_row(l, base[0] + dx, base[1] + dy, base[2] + dz), w);
        }
    }
}

void HashGridEncoder::encode(const Vec3& x, std::span<double> out) const {
    const auto f_per = static_cast<size_t>(cfg_.features_per_level);
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(output_width()), 0.0);
    walk_corners(x, [&](int level, size_t row, double w) {
        double* dst = out.data() + static_cast<size_t>(level) * f_per;
        const double* src = params_.data() + row;
        for (size_t f = 0; f < f_per; ++f) dst[f] += w * src[f];
    });
}

void HashGridEncoder::encode_with_tape(const Vec3& x, std::span<double> out,
                                       std::vector<Touch>& tape) const {
    tape.clear();
    const auto f_per = static_cast<size_t>(cfg_.features_per_level);
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(output_width()), 0.0);
    walk_corners(x, [&](int level, size_t row, double w) {
        tape.push_back({static_cast<uint32_t>(level), row, w});
        double* dst = out.data() + static_cast<size_t>(level) * f_per;
        const double* src = params_.data() + row;
        for (size_t f = 0; f < f_per; ++f) dst[f] += w * src[f];
    });
}

void HashGridEncoder::accumulate_gradient(std::span<const Touch> tape,
                                          std::span<const double> upstream,
                                          std::span<double> grad) const {
    const auto f_per = static_cast<size_t>(cfg_.features_per_level);
    for (const Touch& t : tape) {
        const double* up = upstream.data() + static_cast<size_t>(t.level) * f_per;
        double* dst = grad.data() + t.row_base;
        for (size_t f = 0; f < f_per; ++f) dst[f] += t.weight * up[f];
    }
}

} // namespace sdfplan
