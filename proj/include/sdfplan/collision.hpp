// collision.hpp — clearance tests straight off the field: a configuration is
// free when every transformed control point reads more than xi, and an edge
// is free when that holds along the interpolated sweep.

#pragma once

#include "sdfplan/field.hpp"
#include "sdfplan/sensor.hpp"

namespace sdfplan {

bool collision_free_config(const TsdfField& field, const RobotConfig& q,
                           const RobotGeometry& geom, double xi);

// Interpolates position linearly and yaw/pitch by shortest arc at steps of at
// most `step` meters (endpoints included) and requires every sample free.
bool collision_free_segment(const TsdfField& field, const RobotConfig& from,
                            const RobotConfig& to, const RobotGeometry& geom, double xi,
                            double step);

RobotConfig interpolate_config(const RobotConfig& from, const RobotConfig& to, double t);

} // namespace sdfplan
