// local_sdf.hpp — per-observation implicit representation: a tiny MLP head
// over the frozen shared feature extractor, trained so that surface visible
// in the depth image sits at zero and occluded space is pushed to -truncation.
// Only the head parameters and the snapped box persist on a planning node.

#pragma once

#include "sdfplan/adamw.hpp"
#include "sdfplan/env_field.hpp"
#include "sdfplan/observation.hpp"

namespace sdfplan {

class LocalSdf {
public:
    LocalSdf(const EnvField& field, MlpHead head, const SnappedBoundingBox& box)
        : field_(&field), head_(std::move(head)), box_(box) {
        if (head_.input_width() != static_cast<int>(field.feature_width()))
            throw InvalidInput("local head input width does not match the feature extractor");
    }

    const EnvField& field() const { return *field_; }
    const MlpHead& head() const { return head_; }
    const SnappedBoundingBox& box() const { return box_; }
    size_t param_count() const { return head_.param_count(); }

    // Truncated local SDF value.
    double eval(const Vec3& p) const {
        thread_local std::vector<double> feat;
        feat.resize(field_->feature_width());
        field_->features(p, feat);
        return clamp(head_.forward(feat), -field_->truncation(), field_->truncation());
    }

    // Head output on precomputed features (the coverage path caches the
    // extractor output across ancestor heads).
    double eval_on_features(std::span<const double> feat) const {
        return clamp(head_.forward(feat), -field_->truncation(), field_->truncation());
    }

    void save(const std::string& path) const;
    static LocalSdf load(const std::string& path, const EnvField& field);

private:
    const EnvField* field_;
    MlpHead head_;
    SnappedBoundingBox box_;
};

// Depth-target construction along a hit ray: a point sampled at distance t
// carries the remaining distance to the surface, truncated behind it. Visible
// targets lie in [0, tr], occluded targets in [-tr, 0].
inline double visible_target(double depth, double t) { return depth - t; }
inline double occluded_target(double depth, double t, double truncation) {
    return std::max(depth - t, -truncation);
}

struct LocalTrainSettings {
    int head_param_target = 505; // exact parameter count of theta_P
    int max_iters = 100;
    size_t rays_per_step = 2048; // hit rays subsampled each step
    int visible_samples = 4;     // per selected ray
    int occluded_samples = 4;
    double lambda_vis = 1.0;
    double lambda_occ = 0.5;
    double pad = 0.0; // box padding, meters
    AdamWParams adam; // lr 3e-3 default
};

// Alg. "observation representation": fresh head, frozen extractor, sampled
// visible/occluded depth targets, AdamW for max_iters steps. Deterministic
// under `seed`.
LocalSdf represent_observation(const DepthImage& obs, const EnvField& field,
                               const LocalTrainSettings& settings, uint64_t seed);

// Marching cubes on the local field restricted to its snapped box (same
// lattice as the global pass). An empty result is valid: the view added no
// extractable surface.
SurfacePointSet local_surface_points(const LocalSdf& local);

} // namespace sdfplan
