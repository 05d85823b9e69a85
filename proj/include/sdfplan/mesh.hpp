// mesh.hpp — triangle-only mesh container and OBJ/PLY ingestion.
//
// Conventions:
// - Indices are 0-based in memory (OBJ 1-based indices are converted on load).
// - Non-triangle faces are fan-triangulated on load.
// - `bounds` is tight after load; the training pipeline may widen it to the
//   configured world box before sampling.

#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "sdfplan/core.hpp"

namespace sdfplan {

using Tri = std::array<uint32_t, 3>;

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<Tri> faces;
    Aabb bounds;

    size_t vertex_count() const { return vertices.size(); }
    size_t face_count() const { return faces.size(); }

    Vec3 face_vertex(size_t f, int corner) const { return vertices[faces[f][static_cast<size_t>(corner)]]; }
    double face_area(size_t f) const;
    double total_area() const;

    void recompute_bounds();
    // Throws InvalidInput if a face index is out of range or the mesh is empty.
    void validate() const;
};

enum class MeshFormat { Auto, Obj, Ply };

TriangleMesh load_mesh(const std::string& path, MeshFormat format = MeshFormat::Auto);
TriangleMesh parse_obj(std::istream& in, const std::string& name);
TriangleMesh parse_ply(std::istream& in, const std::string& name);

// Uniform rescale + translation x' = scale * x + translation applied to every
// vertex when a mesh is fitted into a world box. Identity when no
// normalization is requested; stored so costs can be reported in the mesh's
// original units.
struct SceneTransform {
    double scale = 1.0;
    Vec3 translation{0.0, 0.0, 0.0};

    bool is_identity() const { return scale == 1.0 && translation == Vec3{0.0, 0.0, 0.0}; }
    Vec3 apply(const Vec3& p) const { return p * scale + translation; }
};

// Fits the mesh into `box` shrunk by `margin_fraction` per side, preserving
// aspect ratio. Mutates vertices, sets mesh.bounds to the tight transformed
// bounds, and returns the applied transform.
SceneTransform normalize_mesh(TriangleMesh& mesh, const Aabb& box, double margin_fraction = 0.05);

// Writers (ASCII). Points-only PLY for surface sets, full mesh PLY for
// isosurface export, OBJ for debugging.
void write_ply_points(const std::string& path, std::span<const Vec3> points);
void write_ply_mesh(const std::string& path, const TriangleMesh& mesh);
void write_obj(const std::string& path, const TriangleMesh& mesh);

} // namespace sdfplan
