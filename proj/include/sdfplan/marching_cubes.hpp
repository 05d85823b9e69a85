// marching_cubes.hpp — zero-isosurface extraction on the global lattice.
//
// Two outputs serve two jobs:
//  - extract_surface_points emits one vertex per lattice edge with a sign
//    change (coverage is counted over these vertices). Emission order is
//    deterministic (planes ascending, then y, then x) and the interpolation
//    arithmetic depends only on the two corner values and positions, so a
//    restricted pass over a sub-range reproduces the full pass bit-for-bit.
//  - extract_isosurface_mesh produces triangles for visualization/export.

#pragma once

#include "sdfplan/field.hpp"
#include "sdfplan/mesh.hpp"

namespace sdfplan {

struct SurfacePointSet {
    std::vector<Vec3> points;
    std::vector<uint64_t> edge_keys; // packed lattice-edge ids, parallel to points

    size_t count() const { return points.size(); }
};

// Packs (axis, i, j, k) of a lattice edge into a sortable id.
constexpr uint64_t pack_edge_key(int axis, int i, int j, int k) {
    return (static_cast<uint64_t>(axis) << 60) | (static_cast<uint64_t>(i) << 40) |
           (static_cast<uint64_t>(j) << 20) | static_cast<uint64_t>(k);
}

// Vertices of all sign-changing edges inside `range` (corner indices,
// inclusive). When max_abs_value > 0, vertices where |field| exceeds it are
// dropped; pass kappa * cell_size to enforce the surface-fidelity bound.
SurfacePointSet extract_surface_points(const BatchEvalFn& eval, const GridSpec& grid,
                                       const GridRange& range, double max_abs_value);

// Classic tabled marching cubes over `range`; shared vertices via edge keys.
TriangleMesh extract_isosurface_mesh(const BatchEvalFn& eval, const GridSpec& grid,
                                     const GridRange& range);

} // namespace sdfplan
