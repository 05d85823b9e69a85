#include "fixtures.hpp"

#include "sdfplan/shapes.hpp"
#include "sdfplan/tsdf_sampling.hpp"

namespace sdfplan::testing {

std::string data_path(const std::string& name) {
    return std::string(SDFPLAN_DATA_DIR) + "/" + name;
}

const TriangleMesh& sphere_mesh() {
    static const TriangleMesh mesh = make_icosphere({0.0, 0.0, 0.0}, 1.0, 3);
    return mesh;
}

const DistanceOracle& sphere_oracle() {
    static const DistanceOracle oracle(sphere_mesh(), SignMode::RayParity);
    return oracle;
}

const TriangleMesh& cube_mesh() {
    static const TriangleMesh mesh = make_cuboid({{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}});
    return mesh;
}

const DistanceOracle& cube_oracle() {
    static const DistanceOracle oracle(cube_mesh(), SignMode::RayParity);
    return oracle;
}

EnvFieldConfig small_field_config(const Aabb& box, double cell_size) {
    EnvFieldConfig cfg;
    cfg.world_box = box;
    cfg.cell_size = cell_size;
    cfg.truncation = 0.1;
    cfg.hash.table_size_log2 = 13;
    return cfg;
}

namespace {

EnvField train_fixture(const TriangleMesh& mesh, const DistanceOracle& oracle, const Aabb& box,
                       double cell_size, uint64_t seed) {
    TsdfSamplingParams sampling;
    sampling.n_near = 8000;
    sampling.n_far = 3000;
    sampling.truncation = 0.1;
    sampling.seed = seed;
    const TsdfSampleSet samples = sample_tsdf_training_set(mesh, oracle, sampling, box);
    TrainSettings settings;
    settings.epochs = 100;
    settings.batch_size = 2048;
    settings.seed = seed;
    auto [field, report] = train_env_field(samples, small_field_config(box, cell_size), settings);
    (void)report;
    return std::move(field);
}

} // namespace

const EnvField& sphere_field() {
    static const EnvField field = train_fixture(sphere_mesh(), sphere_oracle(),
                                                {{-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}}, 0.025, 21);
    return field;
}

const EnvField& cube_field() {
    static const EnvField field = train_fixture(cube_mesh(), cube_oracle(),
                                                {{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}}, 0.025, 22);
    return field;
}

} // namespace sdfplan::testing
