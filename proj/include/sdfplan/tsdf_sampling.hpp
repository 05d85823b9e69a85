// tsdf_sampling.hpp — training-set generation: truncated signed distances at
// near-surface and free-space points.

#pragma once

#include "sdfplan/distance_oracle.hpp"

namespace sdfplan {

struct TsdfSampleSet {
    std::vector<Vec3> points;      // X
    std::vector<double> values;    // Y, |Y| <= truncation
    double truncation = 0.0;

    size_t size() const { return points.size(); }
};

struct TsdfSamplingParams {
    size_t n_near = 16000;
    size_t n_far = 4000;
    double near_band = 0.0; // 0 selects the default 2 * truncation
    double truncation = 0.1;
    uint64_t seed = 1;
};

// Near points: area-weighted surface samples perturbed uniformly within
// +/- near_band along random directions. Far points: uniform in `bounds`.
// All points are clamped into `bounds`; targets are
// clamp(signed_distance, +/- truncation). Bit-reproducible for a fixed seed.
TsdfSampleSet sample_tsdf_training_set(const TriangleMesh& mesh, const DistanceOracle& oracle,
                                       const TsdfSamplingParams& params, const Aabb& bounds);

void write_samples_csv(const std::string& path, const TsdfSampleSet& set);

} // namespace sdfplan
