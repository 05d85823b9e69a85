#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "sdfplan/coverage.hpp"

using namespace sdfplan;
using testing::sphere_field;

namespace {

struct Chain {
    std::vector<LocalSdf> locals;
    std::vector<SurfacePointSet> points;
    SurfacePointSet s_e;
};

// Five overlapping views orbiting the trained sphere fixture.
const Chain& sphere_chain() {
    static const Chain chain = [] {
        Chain c;
        const EnvField& field = sphere_field();
        c.s_e = global_surface_points(field);
        SensorModel sensor;
        sensor.width = sensor.height = 20;
        sensor.range = 1.2;
        LocalTrainSettings settings;
        settings.max_iters = 150;
        settings.rays_per_step = 128;
        settings.pad = field.grid().cell_size;
        for (int i = 0; i < 5; ++i) {
            const double a = 0.4 * i;
            RobotConfig q;
            q.position = Vec3{std::cos(a), std::sin(a), 0.12} * 1.32;
            q.yaw = wrap_angle(a + kPi);
            q.pitch = -0.1;
            const DepthImage obs = simulate_observation(field, q, sensor);
            REQUIRE(obs.hit_count() > 0);
            c.locals.push_back(
                represent_observation(obs, field, settings, 200 + (uint64_t)i));
            c.points.push_back(local_surface_points(c.locals.back()));
            REQUIRE(c.points.back().count() > 0);
        }
        return c;
    }();
    return chain;
}

} // namespace

TEST_CASE("root node coverage is the plain ratio") {
    const Chain& c = sphere_chain();
    const CoverageResult r =
        total_coverage(c.points[0], c.locals[0].box(), {}, 0.0, c.s_e.count(), 0.0125);
    CHECK(r.surviving == c.points[0].count());
    CHECK(r.coverage ==
          doctest::Approx(double(c.points[0].count()) / double(c.s_e.count())));
}

TEST_CASE("a disjoint ancestor box removes nothing") {
    const Chain& c = sphere_chain();
    const EnvField& field = sphere_field();
    // ancestor on the far side of the sphere: box disjoint from view 0
    SnappedBoundingBox far_box =
        SnappedBoundingBox::snap({{-1.45, -1.45, -1.45}, {-1.2, -1.2, -1.2}}, field.grid());
    REQUIRE_FALSE(far_box.intersects(c.locals[0].box()));
    const AncestorObservation anc{&far_box, &c.locals[1]};
    const CoverageResult r = total_coverage(c.points[0], c.locals[0].box(), {&anc, 1}, 0.0,
                                            c.s_e.count(), 0.0125);
    CHECK(r.surviving == c.points[0].count());
}

TEST_CASE("incremental coverage tracks the explicit set union within 2 points percent") {
    const Chain& c = sphere_chain();
    const double eps = sphere_field().grid().cell_size / 2.0;

    double cov = 0.0;
    std::vector<AncestorObservation> ancestors;
    std::set<uint64_t> union_keys;
    for (size_t i = 0; i < c.locals.size(); ++i) {
        const CoverageResult r = total_coverage(c.points[i], c.locals[i].box(), ancestors, cov,
                                                c.s_e.count(), eps);
        CHECK(r.coverage >= cov - 1e-12); // monotone
        CHECK(r.coverage <= 1.0);
        cov = r.coverage;
        ancestors.push_back({&c.locals[i].box(), &c.locals[i]});
        union_keys.insert(c.points[i].edge_keys.begin(), c.points[i].edge_keys.end());
    }
    const double cov_union = double(union_keys.size()) / double(c.s_e.count());
    CHECK(cov > 0.05); // the chain actually covers something
    CHECK(std::abs(cov - cov_union) <= 0.02);
}

TEST_CASE("box pruning never changes the result") {
    const Chain& c = sphere_chain();
    const double eps = sphere_field().grid().cell_size / 2.0;
    std::vector<AncestorObservation> ancestors;
    double cov = 0.0;
    for (size_t i = 0; i < c.locals.size(); ++i) {
        const CoverageResult pruned = total_coverage(c.points[i], c.locals[i].box(), ancestors,
                                                     cov, c.s_e.count(), eps);
        const CoverageResult full = total_coverage_unpruned(
            c.points[i], c.locals[i].box(), ancestors, cov, c.s_e.count(), eps);
        CHECK(pruned.surviving == full.surviving);
        CHECK(pruned.coverage == full.coverage);
        cov = pruned.coverage;
        ancestors.push_back({&c.locals[i].box(), &c.locals[i]});
    }
}

TEST_CASE("surviving local points plausibly belong to the global surface") {
    const Chain& c = sphere_chain();
    const EnvField& field = sphere_field();
    const double kappa_h = field.grid().cell_size; // kappa = 1
    for (const Vec3& p : c.points[0].points) CHECK(std::abs(field.eval(p)) <= kappa_h);

    // and they correspond to actual global edge keys
    std::set<uint64_t> global_keys(c.s_e.edge_keys.begin(), c.s_e.edge_keys.end());
    size_t member = 0;
    for (const uint64_t k : c.points[0].edge_keys)
        if (global_keys.count(k)) ++member;
    CHECK(double(member) >= 0.9 * double(c.points[0].count()));
}

TEST_CASE("a duplicated observation adds exactly zero new coverage") {
    const Chain& c = sphere_chain();
    const double eps = sphere_field().grid().cell_size / 2.0;
    const AncestorObservation self{&c.locals[0].box(), &c.locals[0]};
    const CoverageResult r = total_coverage(c.points[0], c.locals[0].box(), {&self, 1}, 0.25,
                                            c.s_e.count(), eps);
    // every point of the observation lies on its own zero set
    CHECK(r.surviving == 0);
    CHECK(r.coverage == 0.25);
}

TEST_CASE("coverage rejects bad arguments") {
    const Chain& c = sphere_chain();
    CHECK_THROWS_AS(total_coverage(c.points[0], c.locals[0].box(), {}, 0.0, 0, 0.0125),
                    InvalidInput);
    CHECK_THROWS_AS(total_coverage(c.points[0], c.locals[0].box(), {}, 0.0, 100, 0.0),
                    InvalidInput);
}
