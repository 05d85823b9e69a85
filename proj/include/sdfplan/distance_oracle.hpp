// distance_oracle.hpp — exact mesh queries behind a BVH: point-to-surface
// distance, signed distance, and ray casting. This is the ground-truth
// generator for TSDF training targets and the reference every learned
// primitive is verified against.
//
// Immutable after construction; concurrent read queries are safe.

#pragma once

#include <memory>
#include <optional>

#include "sdfplan/mesh.hpp"

namespace sdfplan {

enum class SignMode {
    RayParity,  // odd crossing count = inside; requires a watertight mesh
    NormalVote, // sign of (p - closest point) . face normal, voted over ties
};

struct RayHit {
    double t = 0.0;
    uint32_t face = 0;
};

class DistanceOracle {
public:
    explicit DistanceOracle(const TriangleMesh& mesh, SignMode mode = SignMode::RayParity);

    double unsigned_distance(const Vec3& p) const;
    double signed_distance(const Vec3& p) const;

    // Nearest intersection with t in (0, max_range], or nothing.
    std::optional<double> ray_cast(const Vec3& origin, const Vec3& dir, double max_range) const;
    std::optional<RayHit> ray_cast_hit(const Vec3& origin, const Vec3& dir, double max_range) const;

    SignMode sign_mode() const { return mode_; }
    const TriangleMesh& mesh() const { return mesh_; }

private:
    struct Node {
        Aabb box;
        int32_t left = -1;   // child index, or -1 for leaves
        int32_t right = -1;
        uint32_t first = 0;  // leaf range into tri_order_
        uint32_t count = 0;
    };

    struct Closest {
        double dist_sq;
        Vec3 point;
        uint32_t face;
    };

    int32_t build(std::vector<uint32_t>& tris, std::vector<Vec3>& centroids);
    void closest_recursive(int32_t node, const Vec3& p, Closest& best) const;
    size_t count_crossings(const Vec3& p, const Vec3& d, bool& grazing) const;
    double parity_sign(const Vec3& p) const;
    double vote_sign(const Vec3& p, const Closest& best) const;

    TriangleMesh mesh_; // owned copy; the oracle outlives its input
    SignMode mode_;
    std::vector<Node> nodes_;
    std::vector<uint32_t> tri_order_;
};

} // namespace sdfplan
