#include <doctest.h>

#include <fstream>

#include "fixtures.hpp"
#include "sdfplan/tsdf_sampling.hpp"

using namespace sdfplan;
using testing::sphere_mesh;
using testing::sphere_oracle;

namespace {
const Aabb kBox{{-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}};
}

TEST_CASE("zero sample counts are rejected") {
    TsdfSamplingParams p;
    p.n_near = 0;
    CHECK_THROWS_AS(sample_tsdf_training_set(sphere_mesh(), sphere_oracle(), p, kBox),
                    InvalidInput);
}

TEST_CASE("near-surface targets stay inside the perturbation band") {
    TsdfSamplingParams p;
    p.n_near = 2000;
    p.n_far = 1;
    p.near_band = 0.05;
    p.truncation = 0.1;
    p.seed = 5;
    const TsdfSampleSet set = sample_tsdf_training_set(sphere_mesh(), sphere_oracle(), p, kBox);
    for (size_t i = 0; i < p.n_near; ++i) {
        CHECK(set.values[i] >= -0.05 - 1e-9);
        CHECK(set.values[i] <= 0.05 + 1e-9);
    }
}

TEST_CASE("every target is the clamped oracle distance") {
    TsdfSamplingParams p;
    p.n_near = 500;
    p.n_far = 500;
    p.truncation = 0.1;
    p.seed = 6;
    const TsdfSampleSet set = sample_tsdf_training_set(sphere_mesh(), sphere_oracle(), p, kBox);
    for (size_t i = 0; i < set.size(); ++i) {
        const double expected =
            clamp(sphere_oracle().signed_distance(set.points[i]), -0.1, 0.1);
        CHECK(set.values[i] == doctest::Approx(expected).epsilon(1e-12));
        CHECK(std::abs(set.values[i]) <= 0.1);
        CHECK(kBox.contains(set.points[i], 1e-12));
    }
}

TEST_CASE("sampling is bit-reproducible for a fixed seed") {
    TsdfSamplingParams p;
    p.n_near = 300;
    p.n_far = 100;
    p.seed = 7;
    const TsdfSampleSet a = sample_tsdf_training_set(sphere_mesh(), sphere_oracle(), p, kBox);
    const TsdfSampleSet b = sample_tsdf_training_set(sphere_mesh(), sphere_oracle(), p, kBox);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a.points[i] == b.points[i]);
        CHECK(a.values[i] == b.values[i]);
    }
    p.seed = 8;
    const TsdfSampleSet c = sample_tsdf_training_set(sphere_mesh(), sphere_oracle(), p, kBox);
    CHECK(!(a.points[0] == c.points[0]));
}

TEST_CASE("degenerate zero-area mesh is rejected") {
    TriangleMesh flat;
    flat.vertices = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    flat.faces = {{0, 1, 2}};
    flat.recompute_bounds();
    const DistanceOracle oracle(flat, SignMode::NormalVote);
    TsdfSamplingParams p;
    CHECK_THROWS_AS(sample_tsdf_training_set(flat, oracle, p, kBox), InvalidInput);
}

TEST_CASE("CSV export writes one row per sample") {
    TsdfSamplingParams p;
    p.n_near = 10;
    p.n_far = 5;
    p.seed = 9;
    const TsdfSampleSet set = sample_tsdf_training_set(sphere_mesh(), sphere_oracle(), p, kBox);
    const std::string path = "/tmp/sdfplan_test_samples.csv";
    write_samples_csv(path, set);
    std::ifstream in(path);
    std::string line;
    size_t lines = 0;
    std::getline(in, line);
    CHECK(line == "x,y,z,tsdf");
    while (std::getline(in, line)) ++lines;
    CHECK(lines == set.size());
}
