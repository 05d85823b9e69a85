#include "sdfplan/sensor.hpp"

#include <fstream>

namespace sdfplan {

RobotGeometry RobotGeometry::drone_cube(double side, double grid_step) {
    if (side <= 0.0 || grid_step <= 0.0) throw InvalidInput("drone size and step must be positive");
    RobotGeometry g;
    g.characteristic_size = side;
    const int n = std::max(2, static_cast<int>(std::ceil(side / grid_step)) + 1);
    const double half = side / 2.0;
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz)
                g.control_points.push_back({-half + side * ix / (n - 1),
                                            -half + side * iy / (n - 1),
                                            -half + side * iz / (n - 1)});

    // Measure the worst surface-to-control-point distance over a dense
    // surface sample; spacing/2 is the coverage radius the collision margin
    // leans on.
    double worst_sq = 0.0;
    const int m = 4 * (n - 1) + 1; // surface sampling finer than the grid
    auto probe = [&](const Vec3& s) {
        double best = std::numeric_limits<double>::max();
        for (const Vec3& c : g.control_points) best = std::min(best, norm_sq(s - c));
        worst_sq = std::max(worst_sq, best);
    };
    for (int a = 0; a < 3; ++a)
        for (int side_sign = -1; side_sign <= 1; side_sign += 2)
            for (int u = 0; u < m; ++u)
                for (int v = 0; v < m; ++v) {
                    Vec3 s;
                    s[a] = half * side_sign;
                    s[(a + 1) % 3] = -half + side * u / (m - 1);
                    s[(a + 2) % 3] = -half + side * v / (m - 1);
                    probe(s);
                }
    g.spacing = 2.0 * std::sqrt(worst_sq);
    return g;
}

size_t DepthImage::hit_count() const {
    size_t n = 0;
    for (size_t i = 0; i < depths.size(); ++i)
        if (is_hit(i)) ++n;
    return n;
}

std::vector<Vec3> sensor_rays(const RobotConfig& q, const SensorModel& sensor) {
    sensor.validate();
    const Vec3 f = q.forward(), r = q.right(), u = q.up();
    const double tan_h = std::tan(sensor.hfov / 2.0);
    const double tan_v = std::tan(sensor.vfov / 2.0);
    std::vector<Vec3> rays;
    rays.reserve(static_cast<size_t>(sensor.width) * static_cast<size_t>(sensor.height));
    for (int row = 0; row < sensor.height; ++row) {
        const double y = (1.0 - 2.0 * (row + 0.5) / sensor.height) * tan_v;
        for (int col = 0; col < sensor.width; ++col) {
            const double x = (2.0 * (col + 0.5) / sensor.width - 1.0) * tan_h;
            rays.push_back(normalized(f + r * x + u * y));
        }
    }
    return rays;
}

void write_depth_pgm(const std::string& path, const DepthImage& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << "P5\n" << image.width << " " << image.height << "\n65535\n";
    for (const double d : image.depths) {
        uint16_t mm = 0;
        if (d > 0.0) {
            const double v = std::round(d * 1000.0);
            mm = static_cast<uint16_t>(clamp(v, 1.0, 65535.0));
        }
        const unsigned char bytes[2] = {static_cast<unsigned char>(mm >> 8),
                                        static_cast<unsigned char>(mm & 0xFF)};
        out.write(reinterpret_cast<const char*>(bytes), 2);
    }
}

} // namespace sdfplan
