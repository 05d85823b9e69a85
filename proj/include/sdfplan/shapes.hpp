// shapes.hpp — procedural test geometry: icospheres and cuboids, plus the
// hollow-shell room used by the bundled planning scene. All watertight, so
// ray-parity signing applies.

#pragma once

#include "sdfplan/mesh.hpp"

namespace sdfplan {

// Subdivided icosahedron; 1280 faces at subdivisions = 3.
TriangleMesh make_icosphere(const Vec3& center, double radius, int subdivisions);

// Axis-aligned box. flip_normals turns it inside out (normals inward).
TriangleMesh make_cuboid(const Aabb& box, bool flip_normals = false);

// Appends `extra` into `mesh` (disjoint shells).
void append_mesh(TriangleMesh& mesh, const TriangleMesh& extra);

} // namespace sdfplan
