// grid.hpp — the global marching-cube lattice and boxes snapped to it. All
// corner positions everywhere in the toolkit come from GridSpec::corner so
// that local extractions reproduce global vertices bit-for-bit.

#pragma once

#include "sdfplan/core.hpp"

namespace sdfplan {

struct GridSpec {
    Vec3 origin;
    double cell_size = 0.0;
    int nx = 0, ny = 0, nz = 0; // cells per axis

    static GridSpec covering(const Aabb& box, double cell_size) {
        if (cell_size <= 0.0) throw InvalidInput("grid cell size must be positive");
        if (!box.valid()) throw InvalidInput("grid box is empty");
        GridSpec g;
        g.origin = box.min;
        g.cell_size = cell_size;
        const Vec3 size = box.size();
        g.nx = static_cast<int>(std::ceil(size.x / cell_size - 1e-9));
        g.ny = static_cast<int>(std::ceil(size.y / cell_size - 1e-9));
        g.nz = static_cast<int>(std::ceil(size.z / cell_size - 1e-9));
        if (g.nx < 1 || g.ny < 1 || g.nz < 1) throw InvalidInput("grid has no cells");
        return g;
    }

    int cells(int axis) const { return axis == 0 ? nx : axis == 1 ? ny : nz; }
    size_t cell_count() const {
        return static_cast<size_t>(nx) * static_cast<size_t>(ny) * static_cast<size_t>(nz);
    }

    Vec3 corner(int i, int j, int k) const {
        return {origin.x + i * cell_size, origin.y + j * cell_size, origin.z + k * cell_size};
    }

    Aabb extent() const {
        Aabb b;
        b.min = origin;
        b.max = corner(nx, ny, nz);
        return b;
    }

    // Nearest lattice index at or below `v` on `axis`, clamped to the grid.
    int snap_down(double v, int axis) const {
        const double t = (v - origin[axis]) / cell_size;
        const int i = static_cast<int>(std::floor(t + 1e-9));
        return std::max(0, std::min(i, cells(axis)));
    }
    int snap_up(double v, int axis) const {
        const double t = (v - origin[axis]) / cell_size;
        const int i = static_cast<int>(std::ceil(t - 1e-9));
        return std::max(0, std::min(i, cells(axis)));
    }

    bool operator==(const GridSpec&) const = default;
};

// Inclusive corner-index range [lo, hi] on each axis; the iteration domain
// for restricted marching-cube passes.
struct GridRange {
    int lo[3] = {0, 0, 0};
    int hi[3] = {0, 0, 0};

    static GridRange full(const GridSpec& g) { return {{0, 0, 0}, {g.nx, g.ny, g.nz}}; }
    bool empty() const { return lo[0] > hi[0] || lo[1] > hi[1] || lo[2] > hi[2]; }
};

struct SnappedBoundingBox {
    Vec3 min, max;
    int idx_min[3] = {0, 0, 0};
    int idx_max[3] = {0, 0, 0};

    // Floor the min corner and ceil the max corner onto the lattice.
    static SnappedBoundingBox snap(const Aabb& raw, const GridSpec& grid) {
        if (!raw.valid()) throw InvalidInput("cannot snap an empty box");
        SnappedBoundingBox b;
        for (int a = 0; a < 3; ++a) {
            b.idx_min[a] = grid.snap_down(raw.min[a], a);
            b.idx_max[a] = grid.snap_up(raw.max[a], a);
        }
        b.min = grid.corner(b.idx_min[0], b.idx_min[1], b.idx_min[2]);
        b.max = grid.corner(b.idx_max[0], b.idx_max[1], b.idx_max[2]);
        return b;
    }

    GridRange range() const {
        return {{idx_min[0], idx_min[1], idx_min[2]}, {idx_max[0], idx_max[1], idx_max[2]}};
    }
    Aabb aabb() const { return {min, max}; }
    bool contains(const Vec3& p) const { return aabb().contains(p); }
    bool intersects(const SnappedBoundingBox& o) const { return aabb().intersects(o.aabb()); }

    bool operator==(const SnappedBoundingBox&) const = default;
};

} // namespace sdfplan
