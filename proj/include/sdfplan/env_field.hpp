// env_field.hpp — the global learned TSDF: a hash-grid + OneBlob feature
// extractor shared by every head, and the global MLP head. Also the home of
// the global surface point set that acts as the coverage denominator.

#pragma once

#include "sdfplan/checkpoint.hpp"
#include "sdfplan/field.hpp"
#include "sdfplan/hash_grid.hpp"
#include "sdfplan/marching_cubes.hpp"
#include "sdfplan/mesh.hpp"
#include "sdfplan/mlp.hpp"
#include "sdfplan/oneblob.hpp"

namespace sdfplan {

struct EnvFieldConfig {
    HashGridConfig hash;
    int oneblob_bins = 7;
    std::vector<int> head_hidden = {32, 32};
    double truncation = 0.1;
    Aabb world_box;
    double cell_size = 0.05; // global marching-cube lattice
    double kappa = 1.0;      // surface points obey |f| <= kappa * cell_size

    size_t feature_width() const {
        return hash.output_width() + 3 * static_cast<size_t>(oneblob_bins);
    }
};

class EnvField final : public TsdfField {
public:
    // Fresh field with seeded parameter initialization.
    EnvField(const EnvFieldConfig& cfg, uint64_t seed);

    const EnvFieldConfig& config() const { return cfg_; }
    uint64_t seed() const { return seed_; }

    double truncation() const override { return cfg_.truncation; }
    const Aabb& world_box() const override { return cfg_.world_box; }
    const GridSpec& grid() const override { return grid_; }
    double eval(const Vec3& p) const override;
    void eval_batch(std::span<const Vec3> points, std::span<double> out) const override;

    // Feature extractor (theta_1 side). Output layout: [hash | oneblob].
    size_t feature_width() const { return cfg_.feature_width(); }
    void features(const Vec3& p, std::span<double> out) const;
    void features_with_tape(const Vec3& p, std::span<double> out,
                            std::vector<HashGridEncoder::Touch>& tape) const;

    HashGridEncoder& hash_grid() { return hash_; }
    const HashGridEncoder& hash_grid() const { return hash_; }
    const OneBlobEncoder& oneblob() const { return oneblob_; }
    MlpHead& head() { return head_; }
    const MlpHead& head() const { return head_; }

    size_t param_count() const { return hash_.param_count() + head_.param_count(); }
    // Checksum over theta_1 (the shared extractor); local training must never
    // change it.
    uint64_t extractor_checksum() const;

    const SceneTransform& scene_transform() const { return transform_; }
    void set_scene_transform(const SceneTransform& t) { transform_ = t; }

    void save(const std::string& path) const;
    static EnvField load(const std::string& path);

private:
    EnvFieldConfig cfg_;
    uint64_t seed_;
    GridSpec grid_;
    HashGridEncoder hash_;
    OneBlobEncoder oneblob_;
    MlpHead head_;
    SceneTransform transform_;
};

// Batch convenience mirroring the field contract: |result| <= truncation.
std::vector<double> eval_tsdf(const TsdfField& field, std::span<const Vec3> points);

// Marching cubes over the full global grid; S_E. Throws DegenerateField when
// the zero level set is empty.
SurfacePointSet global_surface_points(const TsdfField& field, double kappa = 1.0);

} // namespace sdfplan
