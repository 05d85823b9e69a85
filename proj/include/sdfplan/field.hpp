// field.hpp — the truncated signed-distance field interface every planning
// primitive consumes, plus closed-form fields used for verification. Learned
// fields live in env_field.hpp.

#pragma once

#include <functional>

#include "sdfplan/grid.hpp"

namespace sdfplan {

class TsdfField {
public:
    virtual ~TsdfField() = default;

    virtual double truncation() const = 0;
    virtual const Aabb& world_box() const = 0;
    virtual const GridSpec& grid() const = 0;

    // Truncated signed distance; the query point is clamped into the world
    // box first, so this is total over R^3.
    virtual double eval(const Vec3& p) const = 0;

    virtual void eval_batch(std::span<const Vec3> points, std::span<double> out) const {
        for (size_t i = 0; i < points.size(); ++i) out[i] = eval(points[i]);
    }
};

// Closed-form SDF wrapped in the field interface. Bypasses learning entirely;
// the primitive-fidelity checks run against these.
class AnalyticTsdfField final : public TsdfField {
public:
    AnalyticTsdfField(std::function<double(const Vec3&)> sdf, double truncation, const Aabb& box,
                      double cell_size)
        : sdf_(std::move(sdf)), tr_(truncation), box_(box),
          grid_(GridSpec::covering(box, cell_size)) {
        if (tr_ <= 0.0) throw InvalidInput("truncation must be positive");
    }

    static AnalyticTsdfField sphere(const Vec3& center, double radius, double truncation,
                                    const Aabb& box, double cell_size) {
        return AnalyticTsdfField(
            [center, radius](const Vec3& p) { return norm(p - center) - radius; }, truncation,
            box, cell_size);
    }

    // Solid axis-aligned box (negative inside `solid`).
    static AnalyticTsdfField cuboid(const Aabb& solid, double truncation, const Aabb& box,
                                    double cell_size) {
        return AnalyticTsdfField(
            [solid](const Vec3& p) {
                const Vec3 c = solid.center(), half = solid.size() * 0.5;
                const Vec3 q{std::abs(p.x - c.x) - half.x, std::abs(p.y - c.y) - half.y,
                             std::abs(p.z - c.z) - half.z};
                const Vec3 outside = cwise_max(q, {0.0, 0.0, 0.0});
                const double inside = std::min(0.0, std::max({q.x, q.y, q.z}));
                return norm(outside) + inside;
            },
            truncation, box, cell_size);
    }

    // Plane with outward normal n: sdf = dot(p, n) - offset.
    static AnalyticTsdfField half_space(const Vec3& n, double offset, double truncation,
                                        const Aabb& box, double cell_size) {
        const Vec3 nn = normalized(n);
        return AnalyticTsdfField([nn, offset](const Vec3& p) { return dot(p, nn) - offset; },
                                 truncation, box, cell_size);
    }

    double truncation() const override { return tr_; }
    const Aabb& world_box() const override { return box_; }
    const GridSpec& grid() const override { return grid_; }
    double eval(const Vec3& p) const override {
        return clamp(sdf_(box_.clamp(p)), -tr_, tr_);
    }

private:
    std::function<double(const Vec3&)> sdf_;
    double tr_;
    Aabb box_;
    GridSpec grid_;
};

// Batch evaluator handed to marching cubes; lets local heads and oracles plug
// in without inheriting from TsdfField.
using BatchEvalFn = std::function<void(std::span<const Vec3>, std::span<double>)>;

inline BatchEvalFn batch_eval_of(const TsdfField& field) {
    return [&field](std::span<const Vec3> pts, std::span<double> out) {
        field.eval_batch(pts, out);
    };
}

} // namespace sdfplan
