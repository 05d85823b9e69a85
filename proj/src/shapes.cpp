#include "sdfplan/shapes.hpp"

#include <map>

namespace sdfplan {

TriangleMesh make_icosphere(const Vec3& center, double radius, int subdivisions) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> verts = {
        {-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1},
    };
    std::vector<Tri> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
    };
    for (Vec3& v : verts) v = normalized(v);

    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<uint32_t, uint32_t>, uint32_t> midpoints;
        auto midpoint = [&](uint32_t a, uint32_t b) -> uint32_t {
            const auto key = std::minmax(a, b);
            const auto it = midpoints.find(key);
            if (it != midpoints.end()) return it->second;
            const auto id = static_cast<uint32_t>(verts.size());
            verts.push_back(normalized((verts[a] + verts[b]) * 0.5));
            midpoints.emplace(key, id);
            return id;
        };
        std::vector<Tri> next;
        next.reserve(faces.size() * 4);
        for (const Tri& f : faces) {
            const uint32_t ab = midpoint(f[0], f[1]);
            const uint32_t bc = midpoint(f[1], f[2]);
            const uint32_t ca = midpoint(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }

    TriangleMesh mesh;
    mesh.faces = std::move(faces);
    mesh.vertices.reserve(verts.size());
    for (const Vec3& v : verts) mesh.vertices.push_back(center + v * radius);
    mesh.recompute_bounds();
    return mesh;
}

TriangleMesh make_cuboid(const Aabb& box, bool flip_normals) {
    TriangleMesh mesh;
    const Vec3& a = box.min;
    const Vec3& b = box.max;
    mesh.vertices = {
        {a.x, a.y, a.z}, {b.x, a.y, a.z}, {b.x, b.y, a.z}, {a.x, b.y, a.z},
        {a.x, a.y, b.z}, {b.x, a.y, b.z}, {b.x, b.y, b.z}, {a.x, b.y, b.z},
    };
    // CCW outward
    mesh.faces = {
        {0, 2, 1}, {0, 3, 2}, // -z
        {4, 5, 6}, {4, 6, 7}, // +z
        {0, 1, 5}, {0, 5, 4}, // -y
        {3, 6, 2}, {3, 7, 6}, // +y
        {0, 4, 7}, {0, 7, 3}, // -x
        {1, 2, 6}, {1, 6, 5}, // +x
    };
    if (flip_normals)
        for (Tri& f : mesh.faces) std::swap(f[1], f[2]);
    mesh.recompute_bounds();
    return mesh;
}

void append_mesh(TriangleMesh& mesh, const TriangleMesh& extra) {
    const auto base = static_cast<uint32_t>(mesh.vertices.size());
    mesh.vertices.insert(mesh.vertices.end(), extra.vertices.begin(), extra.vertices.end());
    for (const Tri& f : extra.faces)
        mesh.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
    mesh.recompute_bounds();
}

} // namespace sdfplan
