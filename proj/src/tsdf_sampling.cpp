#include "sdfplan/tsdf_sampling.hpp"

#include <fstream>

namespace sdfplan {

namespace {

// Area-weighted triangle index table for deterministic surface sampling.
std::vector<double> cumulative_areas(const TriangleMesh& mesh) {
    std::vector<double> cum(mesh.face_count());
    double acc = 0.0;
    for (size_t f = 0; f < mesh.face_count(); ++f) {
        acc += mesh.face_area(f);
        cum[f] = acc;
    }
    if (acc <= 0.0) throw InvalidInput("mesh has zero surface area");
    return cum;
}

Vec3 sample_on_surface(const TriangleMesh& mesh, const std::vector<double>& cum, Rng& rng) {
    const double r = rng.uniform() * cum.back();
    const auto it = std::lower_bound(cum.begin(), cum.end(), r);
    const size_t f = static_cast<size_t>(it - cum.begin());
    // sqrt trick gives uniform barycentric coordinates
    const double su = std::sqrt(rng.uniform());
    const double v = rng.uniform();
    const Vec3 a = mesh.face_vertex(f, 0), b = mesh.face_vertex(f, 1), c = mesh.face_vertex(f, 2);
    return a * (1.0 - su) + b * (su * (1.0 - v)) + c * (su * v);
}

} // namespace

TsdfSampleSet sample_tsdf_training_set(const TriangleMesh& mesh, const DistanceOracle& oracle,
                                       const TsdfSamplingParams& params, const Aabb& bounds) {
    if (params.n_near == 0 || params.n_far == 0)
        throw InvalidInput("n_near and n_far must be positive");
    if (params.truncation <= 0.0) throw InvalidInput("truncation must be positive");
    const double band = params.near_band > 0.0 ? params.near_band : 2.0 * params.truncation;
    if (!bounds.valid()) throw InvalidInput("sampling bounds are empty");

    const auto cum = cumulative_areas(mesh);
    Rng rng(params.seed);

    TsdfSampleSet set;
    set.truncation = params.truncation;
    set.points.reserve(params.n_near + params.n_far);
    for (size_t i = 0; i < params.n_near; ++i) {
        const Vec3 s = sample_on_surface(mesh, cum, rng);
        const Vec3 p = bounds.clamp(s + rng.unit_vector() * rng.uniform(-band, band));
        set.points.push_back(p);
    }
    for (size_t i = 0; i < params.n_far; ++i) set.points.push_back(rng.uniform_in(bounds));

    set.values.resize(set.points.size());
    for (size_t i = 0; i < set.points.size(); ++i)
        set.values[i] = clamp(oracle.signed_distance(set.points[i]), -params.truncation,
                              params.truncation);
    return set;
}

void write_samples_csv(const std::string& path, const TsdfSampleSet& set) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out.precision(12);
    out << "x,y,z,tsdf\n";
    for (size_t i = 0; i < set.size(); ++i) {
        const Vec3& p = set.points[i];
        out << p.x << "," << p.y << "," << p.z << "," << set.values[i] << "\n";
    }
}

} // namespace sdfplan
