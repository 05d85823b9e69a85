#include "sdfplan/collision.hpp"

namespace sdfplan {

bool collision_free_config(const TsdfField& field, const RobotConfig& q,
                           const RobotGeometry& geom, double xi) {
    if (xi <= 0.0 || xi >= field.truncation())
        throw InvalidInput("collision margin xi must lie in (0, truncation)");
    for (const Vec3& cp : geom.control_points)
        if (field.eval(q.transform(cp)) <= xi) return false;
    return true;
}

RobotConfig interpolate_config(const RobotConfig& from, const RobotConfig& to, double t) {
    RobotConfig q;
    q.position = from.position + (to.position - from.position) * t;
    q.yaw = wrap_angle(from.yaw + angle_diff(to.yaw, from.yaw) * t);
    q.pitch = from.pitch + (to.pitch - from.pitch) * t;
    return q;
}

bool collision_free_segment(const TsdfField& field, const RobotConfig& from,
                            const RobotConfig& to, const RobotGeometry& geom, double xi,
                            double step) {
    if (step <= 0.0 || step > xi) throw InvalidInput("collision step must lie in (0, xi]");
    const double dist = norm(to.position - from.position);
    const bool stationary = dist == 0.0 && angle_diff(to.yaw, from.yaw) == 0.0 &&
                            to.pitch == from.pitch;
    if (stationary) return collision_free_config(field, from, geom, xi);
    const int n = std::max(1, static_cast<int>(std::ceil(dist / step)));
    for (int i = 0; i <= n; ++i)
        if (!collision_free_config(field, interpolate_config(from, to, double(i) / n), geom, xi))
            return false;
    return true;
}

} // namespace sdfplan
