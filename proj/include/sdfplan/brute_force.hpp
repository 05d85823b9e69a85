// brute_force.hpp — reference geometric queries that scan every triangle.
//
// These are the independent oracles used by the verification battery and the
// test suite. They deliberately share no code with DistanceOracle: closest
// points are computed by plane projection + edge clamping (vs the BVH's
// region-based routine) and ray hits by plane intersection + same-side tests
// (vs Moller-Trumbore).

#pragma once

#include <optional>

#include "sdfplan/mesh.hpp"

namespace sdfplan::brute {

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Nearest |distance| over all triangles.
double unsigned_distance(const TriangleMesh& mesh, const Vec3& p);

// Plane-intersection ray/triangle test; returns t > eps or nothing.
std::optional<double> ray_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b,
                                   const Vec3& c, double eps = 1e-12);

// Nearest hit over all triangles within (0, max_range], or nothing.
std::optional<double> ray_cast(const TriangleMesh& mesh, const Vec3& o, const Vec3& d,
                               double max_range);

// Parity sign along a fixed direction battery: -1 inside, +1 outside.
double parity_sign(const TriangleMesh& mesh, const Vec3& p);

double signed_distance(const TriangleMesh& mesh, const Vec3& p);

} // namespace sdfplan::brute
