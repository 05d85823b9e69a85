#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "sdfplan/shapes.hpp"

using namespace sdfplan;

TEST_CASE("single-triangle OBJ parses") {
    std::istringstream in("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
    const TriangleMesh mesh = parse_obj(in, "tri.obj");
    CHECK(mesh.vertex_count() == 3);
    CHECK(mesh.face_count() == 1);
}

TEST_CASE("unit-cube OBJ has [0,1]^3 bounds") {
    const TriangleMesh mesh = load_mesh(testing::data_path("unit_cube.obj"));
    CHECK(mesh.vertex_count() == 8);
    CHECK(mesh.face_count() == 12);
    CHECK(mesh.bounds.min == Vec3{0.0, 0.0, 0.0});
    CHECK(mesh.bounds.max == Vec3{1.0, 1.0, 1.0});
}

TEST_CASE("icosphere PLY counts match an independent header parse") {
    const std::string path = testing::data_path("unit_sphere.ply");
    // independent oracle: read the header records directly
    size_t vertices = 0, faces = 0;
    {
        std::ifstream in(path, std::ios::binary);
        REQUIRE(in);
        std::string line;
        while (std::getline(in, line) && line != "end_header") {
            std::istringstream ls(line);
            std::string tag, name;
            size_t count;
            if (ls >> tag >> name >> count && tag == "element") {
                if (name == "vertex") vertices = count;
                if (name == "face") faces = count;
            }
        }
    }
    REQUIRE(vertices > 0);
    const TriangleMesh mesh = load_mesh(path);
    CHECK(mesh.vertex_count() == vertices);
    CHECK(mesh.face_count() == faces);
    CHECK(mesh.face_count() == 1280);
}

TEST_CASE("quads are fan-triangulated") {
    std::istringstream in("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
    const TriangleMesh mesh = parse_obj(in, "quad.obj");
    CHECK(mesh.face_count() == 2);
}

TEST_CASE("negative OBJ indices are relative") {
    std::istringstream in("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n");
    const TriangleMesh mesh = parse_obj(in, "neg.obj");
    CHECK(mesh.faces[0] == Tri{0, 1, 2});
}

TEST_CASE("parse failures carry the line number") {
    std::istringstream in("v 0 0 0\nv 1 0\nf 1 2 3\n");
    CHECK_THROWS_WITH_AS(parse_obj(in, "bad.obj"), doctest::Contains("bad.obj:2"), DataError);

    std::istringstream bad_face("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n");
    CHECK_THROWS_AS(parse_obj(bad_face, "bad.obj"), DataError);
}

TEST_CASE("empty mesh is invalid input") {
    std::istringstream in("# nothing but comments\n");
    CHECK_THROWS_AS(parse_obj(in, "empty.obj"), InvalidInput);
}

TEST_CASE("missing file reports scene not found") {
    CHECK_THROWS_WITH_AS(load_mesh("/nonexistent/scene.obj"),
                         doctest::Contains("scene not found"), DataError);
}

TEST_CASE("ascii PLY round trip") {
    const std::string path = "/tmp/sdfplan_test_roundtrip.ply";
    write_ply_mesh(path, testing::cube_mesh());
    const TriangleMesh back = load_mesh(path);
    CHECK(back.vertex_count() == testing::cube_mesh().vertex_count());
    CHECK(back.face_count() == testing::cube_mesh().face_count());
}

TEST_CASE("normalization fits a mesh into the world box and stores the transform") {
    TriangleMesh mesh = make_cuboid({{0.0, 0.0, 0.0}, {10.0, 4.0, 2.0}});
    const Aabb box{{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}};
    const SceneTransform t = normalize_mesh(mesh, box, 0.05);
    for (const Vec3& v : mesh.vertices) CHECK(box.contains(v, 1e-12));
    CHECK(t.scale == doctest::Approx(2.0 * 0.9 / 10.0));
    // transform maps the original corner onto the normalized one
    const Vec3 mapped = t.apply({10.0, 4.0, 2.0});
    CHECK(mapped.x == doctest::Approx(mesh.bounds.max.x));
}

TEST_CASE("validate rejects out-of-range face indices") {
    TriangleMesh mesh = testing::cube_mesh();
    mesh.faces.push_back({0, 1, 99});
    CHECK_THROWS_AS(mesh.validate(), InvalidInput);
}
