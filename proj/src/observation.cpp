#include "sdfplan/observation.hpp"

namespace sdfplan {

double march_ray(const TsdfField& field, const Vec3& origin, const Vec3& dir, double max_range,
                 const MarchParams& params) {
    const double step = params.step(field.truncation());
    if (field.eval(origin) <= 0.0) return kMissDepth;

    double t_prev = 0.0;
    while (t_prev < max_range) {
        const double t = std::min(t_prev + step, max_range);
        if (field.eval(origin + dir * t) <= 0.0) {
            // refine the bracket [t_prev, t]; f(t_prev) > 0 by construction
            double lo = t_prev, hi = t;
            for (int i = 0; i < params.bisect_iters; ++i) {
                const double mid = 0.5 * (lo + hi);
                if (field.eval(origin + dir * mid) <= 0.0) hi = mid;
                else lo = mid;
            }
            return 0.5 * (lo + hi);
        }
        t_prev = t;
    }
    return kMissDepth;
}

DepthImage simulate_observation(const TsdfField& field, const RobotConfig& q,
                                const SensorModel& sensor, const MarchParams& params) {
    DepthImage image;
    image.origin = q.position;
    image.width = sensor.width;
    image.height = sensor.height;
    image.max_depth = sensor.range;
    image.directions = sensor_rays(q, sensor);
    image.depths.resize(image.directions.size());
    for (size_t i = 0; i < image.directions.size(); ++i)
        image.depths[i] = march_ray(field, image.origin, image.directions[i], sensor.range,
                                    params);
    return image;
}

SnappedBoundingBox observation_bounding_box(const DepthImage& obs, const TsdfField& field,
                                            double pad) {
    if (pad < 0.0) throw InvalidInput("pad must be non-negative");
    Aabb raw;
    for (size_t i = 0; i < obs.pixel_count(); ++i)
        if (obs.is_hit(i)) raw.expand(obs.hit_point(i));
    if (!raw.valid()) throw EmptyObservation("observation has no hit pixels");
    raw.min -= Vec3{pad, pad, pad};
    raw.max += Vec3{pad, pad, pad};
    return SnappedBoundingBox::snap(raw, field.grid());
}

} // namespace sdfplan
