// observation.hpp — simulated depth sensing on the implicit field: fixed-step
// ray marching with bisection refinement of the first sign change, and the
// grid-snapped bounding box of the resulting hit cloud.

#pragma once

#include "sdfplan/field.hpp"
#include "sdfplan/sensor.hpp"

namespace sdfplan {

struct MarchParams {
    double step_factor = 0.5; // march step = step_factor * truncation
    int bisect_iters = 20;

    double step(double truncation) const { return step_factor * truncation; }
    // Worst-case refinement error after bisecting the bracketing interval.
    double tolerance(double truncation) const {
        return step(truncation) * std::pow(0.5, bisect_iters);
    }
};

// One ray. Returns the refined crossing distance in (0, max_range], or
// kMissDepth. A ray starting at f <= 0 reports a miss (the sensor sits
// behind or on the surface; depths must stay positive).
double march_ray(const TsdfField& field, const Vec3& origin, const Vec3& dir, double max_range,
                 const MarchParams& params);

DepthImage simulate_observation(const TsdfField& field, const RobotConfig& q,
                                const SensorModel& sensor, const MarchParams& params = {});

// Axis-aligned box of all hit points, padded, then floored/ceiled onto the
// global lattice. Throws EmptyObservation when no pixel hit.
SnappedBoundingBox observation_bounding_box(const DepthImage& obs, const TsdfField& field,
                                            double pad);

} // namespace sdfplan
