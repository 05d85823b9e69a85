#include <doctest.h>

#include <map>

#include "fixtures.hpp"
#include "sdfplan/marching_cubes.hpp"

using namespace sdfplan;

namespace {

const Aabb kBox{{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}};

AnalyticTsdfField sphere_half() {
    return AnalyticTsdfField::sphere({0, 0, 0}, 0.5, 0.1, kBox, 0.04);
}

} // namespace

TEST_CASE("restricted extraction reproduces the global pass bitwise") {
    const AnalyticTsdfField field = sphere_half();
    const GridSpec& grid = field.grid();
    const SurfacePointSet global =
        extract_surface_points(batch_eval_of(field), grid, GridRange::full(grid), 0.0);
    REQUIRE(global.count() > 100);

    // snapped sub-box over one octant
    const SnappedBoundingBox box =
        SnappedBoundingBox::snap({{0.0, 0.0, 0.0}, {0.75, 0.75, 0.75}}, grid);
    const SurfacePointSet local =
        extract_surface_points(batch_eval_of(field), grid, box.range(), 0.0);
    REQUIRE(local.count() > 10);

    std::map<uint64_t, Vec3> global_by_key;
    for (size_t i = 0; i < global.count(); ++i)
        global_by_key.emplace(global.edge_keys[i], global.points[i]);
    for (size_t i = 0; i < local.count(); ++i) {
        const auto it = global_by_key.find(local.edge_keys[i]);
        REQUIRE(it != global_by_key.end());
        CHECK(it->second == local.points[i]); // bitwise
    }
}

TEST_CASE("both corners exactly zero place the vertex at the edge midpoint") {
    GridSpec grid;
    grid.origin = {0, 0, 0};
    grid.cell_size = 1.0;
    grid.nx = grid.ny = grid.nz = 1;
    const auto eval = [](std::span<const Vec3> pts, std::span<double> out) {
        for (size_t i = 0; i < pts.size(); ++i) {
            // zero along the edge x in [0,1] at y=z=0; negative above in y
            if (pts[i].y == 0.0 && pts[i].z == 0.0) out[i] = 0.0;
            else if (pts[i].y > 0.0) out[i] = -1.0;
            else out[i] = 1.0;
        }
    };
    const SurfacePointSet set =
        extract_surface_points(eval, grid, GridRange::full(grid), 0.0);
    bool found_midpoint = false;
    for (size_t i = 0; i < set.count(); ++i)
        if (set.points[i] == Vec3{0.5, 0.0, 0.0}) found_midpoint = true;
    CHECK(found_midpoint);
}

TEST_CASE("empty range yields an empty set") {
    const AnalyticTsdfField field = sphere_half();
    GridRange r{{3, 3, 3}, {2, 2, 2}};
    CHECK(extract_surface_points(batch_eval_of(field), field.grid(), r, 0.0).count() == 0);
}

TEST_CASE("kappa filter drops vertices where the field is out of band") {
    const AnalyticTsdfField field = sphere_half();
    const GridSpec& grid = field.grid();
    const SurfacePointSet loose =
        extract_surface_points(batch_eval_of(field), grid, GridRange::full(grid), 0.0);
    const SurfacePointSet tight =
        extract_surface_points(batch_eval_of(field), grid, GridRange::full(grid),
                               1.0 * grid.cell_size);
    // the analytic sphere interpolates cleanly: nothing should be dropped
    CHECK(loose.count() == tight.count());
    for (const Vec3& p : tight.points) CHECK(std::abs(field.eval(p)) <= grid.cell_size);
}

TEST_CASE("isosurface mesh approximates the sphere and refines with the grid") {
    const AnalyticTsdfField field = sphere_half();
    const GridSpec& coarse = field.grid();
    const TriangleMesh mesh =
        extract_isosurface_mesh(batch_eval_of(field), coarse, GridRange::full(coarse));
    REQUIRE(mesh.face_count() > 100);
    double mean_r = 0.0;
    for (const Vec3& v : mesh.vertices) mean_r += norm(v);
    mean_r /= static_cast<double>(mesh.vertex_count());
    CHECK(mean_r == doctest::Approx(0.5).epsilon(2.0 * coarse.cell_size));

    const GridSpec fine = GridSpec::covering(kBox, 0.02);
    const TriangleMesh mesh_fine =
        extract_isosurface_mesh(batch_eval_of(field), fine, GridRange::full(fine));
    CHECK(mesh_fine.vertex_count() > mesh.vertex_count());

    // every face references valid shared vertices
    mesh_fine.validate();
}

TEST_CASE("snapped box arithmetic floors and ceils onto the lattice") {
    GridSpec grid;
    grid.origin = {0, 0, 0};
    grid.cell_size = 0.02;
    grid.nx = grid.ny = grid.nz = 50;
    const SnappedBoundingBox b =
        SnappedBoundingBox::snap({{0.013, 0.013, 0.013}, {0.094, 0.094, 0.094}}, grid);
    CHECK(b.min.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(b.max.x == doctest::Approx(0.10).epsilon(1e-12));
    CHECK(b.idx_min[0] == 0);
    CHECK(b.idx_max[0] == 5);
    // corners are exact lattice points
    for (int a = 0; a < 3; ++a) {
        const double t = (b.max[a] - grid.origin[a]) / grid.cell_size;
        CHECK(std::abs(t - std::round(t)) < 1e-9);
    }
}
