#include "sdfplan/marching_cubes.hpp"

#include <unordered_map>

namespace sdfplan {

namespace {

#include "mc_tables.inc"

// Cube corner c -> lattice offsets, conventional ordering:
//   0:(0,0,0) 1:(1,0,0) 2:(1,1,0) 3:(0,1,0) 4:(0,0,1) 5:(1,0,1) 6:(1,1,1) 7:(0,1,1)
constexpr int kCornerOff[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                  {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};

// Cube edge e -> (axis, lattice offset of the lower corner).
constexpr int kEdgeAxis[12] = {0, 1, 0, 1, 0, 1, 0, 1, 2, 2, 2, 2};
constexpr int kEdgeOff[12][3] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 0},
                                 {0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {0, 0, 1},
                                 {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};

// Interpolated zero crossing between lattice corners a (lower) and b (upper).
// Both corners exactly zero places the vertex at the midpoint.
bool edge_vertex(double va, double vb, const Vec3& ca, const Vec3& cb, Vec3& out) {
    if (va == 0.0 && vb == 0.0) {
        out = (ca + cb) * 0.5;
        return true;
    }
    if ((va < 0.0) == (vb < 0.0)) return false;
    const double t = va / (va - vb);
    out = ca + (cb - ca) * t;
    return true;
}

// One corner plane of the range, row-major over (j, i).
class PlaneEval {
public:
    PlaneEval(const BatchEvalFn& eval, const GridSpec& grid, const GridRange& range)
        : eval_(eval), grid_(grid), range_(range),
          cx_(range.hi[0] - range.lo[0] + 1), cy_(range.hi[1] - range.lo[1] + 1) {
        points_.resize(static_cast<size_t>(cx_) * static_cast<size_t>(cy_));
    }

    std::vector<double> evaluate(int k) {
        size_t n = 0;
        for (int j = range_.lo[1]; j <= range_.hi[1]; ++j)
            for (int i = range_.lo[0]; i <= range_.hi[0]; ++i)
                points_[n++] = grid_.corner(i, j, k);
        std::vector<double> vals(points_.size());
        eval_(points_, vals);
        return vals;
    }

    size_t index(int i, int j) const {
        return static_cast<size_t>(j - range_.lo[1]) * static_cast<size_t>(cx_) +
               static_cast<size_t>(i - range_.lo[0]);
    }

private:
    const BatchEvalFn& eval_;
    const GridSpec& grid_;
    GridRange range_;
    int cx_, cy_;
    std::vector<Vec3> points_;
};

} // namespace

SurfacePointSet extract_surface_points(const BatchEvalFn& eval, const GridSpec& grid,
                                       const GridRange& range, double max_abs_value) {
    SurfacePointSet set;
    if (range.empty()) return set;

    PlaneEval planes(eval, grid, range);
    std::vector<double> cur = planes.evaluate(range.lo[2]);
    std::vector<double> nxt;

    std::vector<Vec3> cand_pts;
    std::vector<uint64_t> cand_keys;
    std::vector<double> cand_vals;
    const auto flush = [&]() {
        if (cand_pts.empty()) return;
        if (max_abs_value > 0.0) {
            cand_vals.resize(cand_pts.size());
            eval(cand_pts, cand_vals);
            for (size_t i = 0; i < cand_pts.size(); ++i) {
                if (std::abs(cand_vals[i]) <= max_abs_value) {
                    set.points.push_back(cand_pts[i]);
                    set.edge_keys.push_back(cand_keys[i]);
                }
            }
        } else {
            set.points.insert(set.points.end(), cand_pts.begin(), cand_pts.end());
            set.edge_keys.insert(set.edge_keys.end(), cand_keys.begin(), cand_keys.end());
        }
        cand_pts.clear();
        cand_keys.clear();
    };

    for (int k = range.lo[2]; k <= range.hi[2]; ++k) {
        // in-plane x and y edges
        for (int j = range.lo[1]; j <= range.hi[1]; ++j) {
            for (int i = range.lo[0]; i <= range.hi[0]; ++i) {
                const double va = cur[planes.index(i, j)];
                Vec3 v;
                if (i < range.hi[0] &&
                    edge_vertex(va, cur[planes.index(i + 1, j)], grid.corner(i, j, k),
                                grid.corner(i + 1, j, k), v)) {
                    cand_pts.push_back(v);
                    cand_keys.push_back(pack_edge_key(0, i, j, k));
                }
                if (j < range.hi[1] &&
                    edge_vertex(va, cur[planes.index(i, j + 1)], grid.corner(i, j, k),
                                grid.corner(i, j + 1, k), v)) {
                    cand_pts.push_back(v);
                    cand_keys.push_back(pack_edge_key(1, i, j, k));
                }
            }
        }
        // z edges to the next plane
        if (k < range.hi[2]) {
            nxt = planes.evaluate(k + 1);
            for (int j = range.lo[1]; j <= range.hi[1]; ++j) {
                for (int i = range.lo[0]; i <= range.hi[0]; ++i) {
                    Vec3 v;
                    if (edge_vertex(cur[planes.index(i, j)], nxt[planes.index(i, j)],
                                    grid.corner(i, j, k), grid.corner(i, j, k + 1), v)) {
                        cand_pts.push_back(v);
                        cand_keys.push_back(pack_edge_key(2, i, j, k));
                    }
                }
            }
            cur.swap(nxt);
        }
        flush();
    }
    return set;
}

TriangleMesh extract_isosurface_mesh(const BatchEvalFn& eval, const GridSpec& grid,
                                     const GridRange& range) {
    TriangleMesh mesh;
    if (range.empty() || range.lo[0] == range.hi[0] || range.lo[1] == range.hi[1] ||
        range.lo[2] == range.hi[2]) {
        return mesh;
    }

    PlaneEval planes(eval, grid, range);
    std::vector<double> cur = planes.evaluate(range.lo[2]);
    std::vector<double> nxt;
    std::unordered_map<uint64_t, uint32_t> vertex_ids;

    const auto vertex_on_edge = [&](int axis, int i, int j, int k, double va,
                                    double vb) -> uint32_t {
        const uint64_t key = pack_edge_key(axis, i, j, k);
        const auto it = vertex_ids.find(key);
        if (it != vertex_ids.end()) return it->second;
        const int ui = i + (axis == 0), uj = j + (axis == 1), uk = k + (axis == 2);
        Vec3 v;
        if (!edge_vertex(va, vb, grid.corner(i, j, k), grid.corner(ui, uj, uk), v))
            v = (grid.corner(i, j, k) + grid.corner(ui, uj, uk)) * 0.5; // degenerate case
        const auto id = static_cast<uint32_t>(mesh.vertices.size());
        mesh.vertices.push_back(v);
        vertex_ids.emplace(key, id);
        return id;
    };

    for (int k = range.lo[2]; k < range.hi[2]; ++k) {
        nxt = planes.evaluate(k + 1);
        const std::vector<double>* plane_of[2] = {&cur, &nxt};
        for (int j = range.lo[1]; j < range.hi[1]; ++j) {
            for (int i = range.lo[0]; i < range.hi[0]; ++i) {
                double val[8];
                int cube = 0;
                for (int c = 0; c < 8; ++c) {
                    const auto& plane = *plane_of[kCornerOff[c][2]];
                    val[c] = plane[planes.index(i + kCornerOff[c][0], j + kCornerOff[c][1])];
                    if (val[c] < 0.0) cube |= 1 << c;
                }
                if (kEdgeTable[cube] == 0) continue;
                uint32_t edge_vert[12];
                for (int e = 0; e < 12; ++e) {
                    if (!(kEdgeTable[cube] & (1 << e))) continue;
                    const int axis = kEdgeAxis[e];
                    const int ei = i + kEdgeOff[e][0], ej = j + kEdgeOff[e][1],
                              ek = k + kEdgeOff[e][2];
                    // corner values at the edge's lower/upper lattice ends
                    double va, vb;
                    {
                        const int li = ei - i, lj = ej - j, lk = ek - k;
                        const int uic = li + (axis == 0), ujc = lj + (axis == 1),
                                  ukc = lk + (axis == 2);
                        auto corner_val = [&](int ci, int cj, int ck) {
                            const auto& plane = *plane_of[ck];
                            return plane[planes.index(i + ci, j + cj)];
                        };
                        va = corner_val(li, lj, lk);
                        vb = corner_val(uic, ujc, ukc);
                    }
                    edge_vert[e] = vertex_on_edge(axis, ei, ej, ek, va, vb);
                }
                for (int t = 0; kTriTable[cube][t] != -1; t += 3) {
                    mesh.faces.push_back({edge_vert[kTriTable[cube][t]],
                                          edge_vert[kTriTable[cube][t + 1]],
                                          edge_vert[kTriTable[cube][t + 2]]});
                }
            }
        }
        cur.swap(nxt);
    }
    mesh.recompute_bounds();
    return mesh;
}

} // namespace sdfplan
