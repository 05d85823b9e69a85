#include <doctest.h>

#include "fixtures.hpp"
#include "sdfplan/brute_force.hpp"
#include "sdfplan/shapes.hpp"

using namespace sdfplan;
using testing::cube_mesh;
using testing::cube_oracle;
using testing::sphere_mesh;
using testing::sphere_oracle;

TEST_CASE("sphere distances match the analytic sphere") {
    // faceting makes the mesh slightly smaller than the analytic sphere
    CHECK(sphere_oracle().signed_distance({0.0, 0.0, 0.0}) == doctest::Approx(-1.0).epsilon(0.02));
    CHECK(sphere_oracle().signed_distance({2.0, 0.0, 0.0}) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("accelerated distance equals the brute-force scan") {
    Rng rng(42);
    const Aabb box{{-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}};
    const TriangleMesh mesh = make_icosphere({0.1, -0.2, 0.05}, 0.8, 2); // 320 faces
    const DistanceOracle oracle(mesh);
    for (int i = 0; i < 500; ++i) {
        const Vec3 p = rng.uniform_in(box);
        const double fast = oracle.signed_distance(p);
        const double slow = brute::signed_distance(mesh, p);
        CHECK(std::abs(std::abs(fast) - std::abs(slow)) < 1e-6);
        CHECK(fast * slow >= 0.0);
    }
}

TEST_CASE("accelerated raycast equals the brute-force scan") {
    Rng rng(43);
    const Aabb box{{-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}};
    size_t hits = 0;
    for (int i = 0; i < 1000; ++i) {
        const Vec3 o = rng.uniform_in(box);
        const Vec3 d = rng.unit_vector();
        const auto fast = sphere_oracle().ray_cast(o, d, 3.0);
        const auto slow = brute::ray_cast(sphere_mesh(), o, d, 3.0);
        REQUIRE(fast.has_value() == slow.has_value());
        if (fast) {
            CHECK(std::abs(*fast - *slow) < 1e-6);
            ++hits;
        }
    }
    CHECK(hits > 100); // the battery actually exercises hits
}

TEST_CASE("ray examples") {
    const auto t = sphere_oracle().ray_cast({2.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}, 5.0);
    REQUIRE(t.has_value());
    CHECK(*t == doctest::Approx(1.0).epsilon(0.02));

    CHECK_FALSE(sphere_oracle().ray_cast({2.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, 5.0).has_value());
    CHECK_THROWS_AS(sphere_oracle().ray_cast({0, 0, 0}, {1.0, 1.0, 0.0}, 1.0), InvalidInput);
}

TEST_CASE("sign convention on the watertight cube") {
    CHECK(cube_oracle().signed_distance({0.0, 0.0, 0.0}) < 0.0);
    CHECK(cube_oracle().signed_distance({0.9, 0.0, 0.0}) > 0.0);
    CHECK(cube_oracle().signed_distance({0.9, 0.9, 0.9}) > 0.0);
}

TEST_CASE("normal-vote sign agrees with parity on a watertight mesh") {
    const DistanceOracle vote(sphere_mesh(), SignMode::NormalVote);
    Rng rng(44);
    const Aabb box{{-1.3, -1.3, -1.3}, {1.3, 1.3, 1.3}};
    for (int i = 0; i < 200; ++i) {
        const Vec3 p = rng.uniform_in(box);
        const double a = vote.signed_distance(p);
        const double b = sphere_oracle().signed_distance(p);
        if (std::abs(b) > 1e-6) CHECK(a * b > 0.0);
    }
}
