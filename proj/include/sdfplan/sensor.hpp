// sensor.hpp — robot configuration (5-DOF: position, yaw, pitch), body
// control points for collision checks, the pyramid-frustum depth sensor, and
// the simulated depth image.

#pragma once

#include "sdfplan/core.hpp"

namespace sdfplan {

struct RobotConfig {
    Vec3 position;
    double yaw = 0.0;   // [-pi, pi), about +z
    double pitch = 0.0; // [-pi/2, pi/2], up-positive

    void normalize_angles() {
        yaw = wrap_angle(yaw);
        pitch = clamp(pitch, -kPi / 2.0, kPi / 2.0);
    }

    Vec3 forward() const {
        const double cp = std::cos(pitch);
        return {cp * std::cos(yaw), cp * std::sin(yaw), std::sin(pitch)};
    }
    Vec3 right() const { return {std::sin(yaw), -std::cos(yaw), 0.0}; }
    Vec3 up() const {
        const double sp = std::sin(pitch), cp = std::cos(pitch);
        return {-sp * std::cos(yaw), -sp * std::sin(yaw), cp};
    }

    // Body-to-world transform of a body-frame offset.
    Vec3 transform(const Vec3& body) const {
        return position + forward() * body.x + right() * (-body.y) + up() * body.z;
    }
};

struct RobotGeometry {
    std::vector<Vec3> control_points; // body frame
    double characteristic_size = 0.0; // meters
    double spacing = 0.0;             // 2 x max body-surface distance to nearest control point

    // Cube body of the given side with a regular control-point grid at most
    // `grid_step` apart. `spacing` is measured against a dense sample of the
    // cube surface so the encapsulation bound holds by construction.
    static RobotGeometry drone_cube(double side, double grid_step);
};

struct SensorModel {
    int width = 32;
    int height = 32;
    double hfov = kPi / 2.0; // radians
    double vfov = kPi / 2.0;
    double range = 1.0; // meters

    void validate() const {
        if (width < 2 || height < 2) throw InvalidInput("sensor needs at least 2x2 pixels");
        if (hfov <= 0.0 || hfov >= kPi || vfov <= 0.0 || vfov >= kPi)
            throw InvalidInput("field of view must lie in (0, pi)");
        if (range <= 0.0) throw InvalidInput("sensor range must be positive");
    }
};

inline constexpr double kMissDepth = -1.0;

struct DepthImage {
    Vec3 origin;
    int width = 0, height = 0;
    std::vector<Vec3> directions; // row-major, unit length
    std::vector<double> depths;   // kMissDepth where no surface was hit
    double max_depth = 0.0;       // sensor range

    size_t pixel_count() const { return depths.size(); }
    bool is_hit(size_t i) const { return depths[i] > 0.0; }
    size_t hit_count() const;
    Vec3 hit_point(size_t i) const { return origin + directions[i] * depths[i]; }
};

// Pixel rays for configuration q: forward camera with symmetric pyramid
// frustum, row 0 at the image top.
std::vector<Vec3> sensor_rays(const RobotConfig& q, const SensorModel& sensor);

// 16-bit PGM, depth in millimeters, 0 marks a miss.
void write_depth_pgm(const std::string& path, const DepthImage& image);

} // namespace sdfplan
