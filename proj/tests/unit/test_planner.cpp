#include <doctest.h>

#include <map>

#include "fixtures.hpp"
#include "sdfplan/planner.hpp"

using namespace sdfplan;
using testing::sphere_field;

namespace {

PlannerSettings base_settings() {
    PlannerSettings s;
    s.edge_length = 0.3;
    s.crowding_radius = 0.3;
    s.xi = 0.07;
    s.collision_step = 0.07;
    s.coverage_eps = 0.0125;
    s.seed = 17;
    s.root.position = {1.25, 0.1, 0.05};
    s.root.yaw = kPi;
    s.local_train.max_iters = 80;
    s.local_train.rays_per_step = 64;
    s.local_train.pad = 0.025;
    s.prune_interval = 0;
    s.node_budget = 8;
    s.time_budget_s = 300.0;
    return s;
}

SensorModel small_sensor() {
    SensorModel sensor;
    sensor.width = sensor.height = 12;
    sensor.range = 1.0;
    return sensor;
}

PlanNode bare_node(const Vec3& pos, double cov, double cost, int parent) {
    PlanNode n;
    n.q.position = pos;
    n.coverage = cov;
    n.cost = cost;
    n.parent = parent;
    return n;
}

uint64_t tree_fingerprint(const PlanTree& tree) {
    uint64_t h = 0xCBF29CE484222325ull;
    for (const PlanNode& n : tree.nodes()) {
        h = fnv1a64(&n.q, sizeof(n.q), h);
        h = fnv1a64(&n.coverage, sizeof(n.coverage), h);
        h = fnv1a64(&n.cost, sizeof(n.cost), h);
        h = fnv1a64(&n.parent, sizeof(n.parent), h);
        const size_t params = n.local ? n.local->param_count() : 0;
        h = fnv1a64(&params, sizeof(params), h);
        if (n.local)
            h = fnv1a64(n.local->head().params().data(), params * sizeof(double), h);
    }
    return h;
}

} // namespace

// ---------------------------------------------------------------------------
// Expansion-node selection

TEST_CASE("a single node is always selected") {
    const PlannerSettings s = base_settings();
    PlanTree tree(s);
    tree.add_node(bare_node({0, 0, 0}, 0.0, 0.0, -1));
    Rng rng(1);
    for (int i = 0; i < 100; ++i) CHECK(select_expansion_node(tree, s, rng) == 0);
}

TEST_CASE("two isolated zero-coverage nodes are drawn evenly") {
    const PlannerSettings s = base_settings();
    PlanTree tree(s);
    tree.add_node(bare_node({0, 0, 0}, 0.0, 0.0, -1));
    tree.add_node(bare_node({1.0, 1.0, 1.0}, 0.0, 1.7, 0));
    Rng rng(2);
    size_t first = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i)
        if (select_expansion_node(tree, s, rng) == 0) ++first;
    CHECK(std::abs(double(first) / draws - 0.5) < 0.02);
}

TEST_CASE("selection frequencies match the crowding/coverage weights") {
    PlannerSettings s = base_settings();
    s.alpha = 10.0;
    s.crowding_radius = 0.5;
    PlanTree tree(s);
    // nodes 0 and 1 crowd each other (distance 0.3 < 0.5); node 2 is isolated
    tree.add_node(bare_node({0, 0, 0}, 0.0, 0.0, -1));
    tree.add_node(bare_node({0.3, 0, 0}, 0.10, 0.3, 0));
    tree.add_node(bare_node({1.4, 1.4, 1.4}, 0.05, 2.7, 0));
    REQUIRE(tree.crowding(0) == 2);
    REQUIRE(tree.crowding(1) == 2);
    REQUIRE(tree.crowding(2) == 1);

    const double w0 = 1.0 / 2.0 + 10.0 * 0.0;
    const double w1 = 1.0 / 2.0 + 10.0 * 0.10;
    const double w2 = 1.0 / 1.0 + 10.0 * 0.05;
    const double total = w0 + w1 + w2;

    Rng rng(3);
    size_t counts[3] = {0, 0, 0};
    const int draws = 100000;
    for (int i = 0; i < draws; ++i)
        ++counts[static_cast<size_t>(select_expansion_node(tree, s, rng))];
    CHECK(std::abs(double(counts[0]) / draws - w0 / total) < 0.01);
    CHECK(std::abs(double(counts[1]) / draws - w1 / total) < 0.01);
    CHECK(std::abs(double(counts[2]) / draws - w2 / total) < 0.01);
}

// ---------------------------------------------------------------------------
// Child sampling

TEST_CASE("zero edge bound keeps the child at the parent") {
    PlannerSettings s = base_settings();
    s.edge_length = 0.0;
    Rng rng(4);
    const RobotConfig parent = s.root;
    const RobotConfig child =
        sample_child_config(parent, s, sphere_field().world_box(), rng);
    CHECK(child.position == parent.position);
}

TEST_CASE("children stay inside the ball and cover all octants") {
    PlannerSettings s = base_settings();
    s.edge_length = 0.4;
    Rng rng(5);
    RobotConfig parent;
    parent.position = {0.0, 0.0, 0.0};
    const Aabb wide{{-2, -2, -2}, {2, 2, 2}}; // no clamping interference
    size_t octants[8] = {0};
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const RobotConfig c = sample_child_config(parent, s, wide, rng);
        const Vec3 d = c.position - parent.position;
        CHECK(norm(d) <= s.edge_length + 1e-12);
        CHECK(c.pitch >= -kPi / 2.0);
        CHECK(c.pitch <= kPi / 2.0);
        CHECK(c.yaw >= -kPi);
        CHECK(c.yaw < kPi);
        const size_t oct = (d.x > 0 ? 4u : 0u) | (d.y > 0 ? 2u : 0u) | (d.z > 0 ? 1u : 0u);
        ++octants[oct];
    }
    // chi-squared against uniform octants; 18.475 = 0.99 quantile at 7 dof
    double chi2 = 0.0;
    for (size_t o = 0; o < 8; ++o) {
        const double expect = n / 8.0;
        chi2 += (octants[o] - expect) * (octants[o] - expect) / expect;
    }
    CHECK(chi2 < 18.475);
}

TEST_CASE("child sampling is reproducible under the seed") {
    PlannerSettings s = base_settings();
    Rng a(6), b(6);
    for (int i = 0; i < 100; ++i) {
        const RobotConfig ca = sample_child_config(s.root, s, sphere_field().world_box(), a);
        const RobotConfig cb = sample_child_config(s.root, s, sphere_field().world_box(), b);
        CHECK(ca.position == cb.position);
        CHECK(ca.yaw == cb.yaw);
        CHECK(ca.pitch == cb.pitch);
    }
}

// ---------------------------------------------------------------------------
// Pruning

TEST_CASE("pruning a chain is a no-op") {
    const PlannerSettings s = base_settings();
    PlanTree tree(s);
    tree.add_node(bare_node({0, 0, 0}, 0.0, 0.0, -1));
    tree.add_node(bare_node({0.2, 0, 0}, 0.1, 0.2, 0));
    tree.add_node(bare_node({0.4, 0, 0}, 0.2, 0.4, 1));
    tree.prune_to_best_branch();
    CHECK(tree.size() == 3);
    CHECK(tree.node(2).coverage == 0.2);
}

TEST_CASE("pruning a star keeps the best leaf") {
    const PlannerSettings s = base_settings();
    PlanTree tree(s);
    tree.add_node(bare_node({0, 0, 0}, 0.0, 0.0, -1));
    tree.add_node(bare_node({0.2, 0, 0}, 0.1, 0.2, 0));
    tree.add_node(bare_node({0, 0.2, 0}, 0.3, 0.2, 0));
    tree.add_node(bare_node({0, 0, 0.2}, 0.2, 0.2, 0));
    tree.prune_to_best_branch();
    REQUIRE(tree.size() == 2);
    CHECK(tree.node(1).coverage == 0.3);
    CHECK(tree.node(0).children == std::vector<int>{1});
}

TEST_CASE("pruning a random tree matches the exhaustive best-path scan") {
    const PlannerSettings s = base_settings();
    Rng rng(7);
    PlanTree tree(s);
    tree.add_node(bare_node({0, 0, 0}, 0.0, 0.0, -1));
    for (int i = 1; i < 200; ++i) {
        const int parent = static_cast<int>(rng.uniform_int(tree.size()));
        const PlanNode& p = tree.node(parent);
        const Vec3 pos = p.q.position + rng.in_unit_ball() * 0.2;
        const double cov = std::min(1.0, p.coverage + rng.uniform(0.0, 0.01));
        tree.add_node(bare_node(pos, cov, p.cost + norm(pos - p.q.position), parent));
    }
    // exhaustive oracle over leaves (coverage desc, cost asc, id asc)
    int best = -1;
    for (size_t i = 0; i < tree.size(); ++i) {
        if (!tree.node(static_cast<int>(i)).is_leaf()) continue;
        if (best < 0) {
            best = static_cast<int>(i);
            continue;
        }
        const PlanNode& cand = tree.node(static_cast<int>(i));
        const PlanNode& cur = tree.node(best);
        if (cand.coverage > cur.coverage ||
            (cand.coverage == cur.coverage && cand.cost < cur.cost))
            best = static_cast<int>(i);
    }
    const std::vector<int> expect_chain = tree.chain_to(best);
    std::vector<Vec3> expect_positions;
    for (const int id : expect_chain) expect_positions.push_back(tree.node(id).q.position);
    const double expect_cov = tree.node(best).coverage;

    tree.prune_to_best_branch();
    REQUIRE(tree.size() == expect_positions.size());
    for (size_t i = 0; i < tree.size(); ++i)
        CHECK(tree.node(static_cast<int>(i)).q.position == expect_positions[i]);
    CHECK(tree.node(static_cast<int>(tree.size()) - 1).coverage == expect_cov);
    // a pruned tree is a single chain
    for (size_t i = 0; i + 1 < tree.size(); ++i)
        CHECK(tree.node(static_cast<int>(i)).children ==
              std::vector<int>{static_cast<int>(i) + 1});
}

// ---------------------------------------------------------------------------
// Full expansion loop on the trained sphere fixture

TEST_CASE("node budget 1 plans the root alone") {
    PlannerSettings s = base_settings();
    s.node_budget = 1;
    Planner planner(sphere_field(), RobotGeometry::drone_cube(0.1, 0.04), small_sensor(), s);
    const PlanResult r = planner.plan();
    CHECK(r.trajectory.size() == 1);
    CHECK(r.cost == 0.0);
    CHECK(r.nodes_added == 0);
    CHECK(r.trajectory[0].coverage >= 0.0);
}

TEST_CASE("a colliding root is a setup error") {
    PlannerSettings s = base_settings();
    s.root.position = {0.0, 0.0, 0.0}; // inside the sphere
    CHECK_THROWS_AS(
        Planner(sphere_field(), RobotGeometry::drone_cube(0.1, 0.04), small_sensor(), s),
        InvalidInput);
}

TEST_CASE("a sensor that cannot hit keeps coverage at zero and terminates") {
    PlannerSettings s = base_settings();
    s.node_budget = 50;
    s.iteration_budget = 30;
    SensorModel sensor = small_sensor();
    sensor.range = 0.02; // nothing within reach from free space (xi > range)
    Planner planner(sphere_field(), RobotGeometry::drone_cube(0.1, 0.04), sensor, s);
    const PlanResult r = planner.plan();
    CHECK(r.coverage == 0.0);
    CHECK(r.iterations == 30);
}

TEST_CASE("rejected expansions leave the tree bit-identical") {
    PlannerSettings s = base_settings();
    Planner planner(sphere_field(), RobotGeometry::drone_cube(0.1, 0.04), small_sensor(), s);
    size_t rejections = 0;
    for (int i = 0; i < 40 && rejections < 3; ++i) {
        const uint64_t before = tree_fingerprint(planner.tree());
        const ExpandOutcome out = planner.expand_once();
        if (!out.added()) {
            ++rejections;
            CHECK(tree_fingerprint(planner.tree()) == before);
        }
    }
    CHECK(rejections > 0);
}

TEST_CASE("added children never lose coverage and a fresh view gains some") {
    PlannerSettings s = base_settings();
    s.node_budget = 12;
    Planner planner(sphere_field(), RobotGeometry::drone_cube(0.1, 0.04), small_sensor(), s);
    const PlanResult r = planner.plan();
    REQUIRE(r.nodes_added > 0);
    const PlanTree& tree = planner.tree();
    bool strictly_gained = false;
    for (size_t i = 1; i < tree.size(); ++i) {
        const PlanNode& n = tree.node(static_cast<int>(i));
        const PlanNode& p = tree.node(n.parent);
        CHECK(n.coverage >= p.coverage);
        CHECK(n.cost > p.cost);
        if (n.coverage > p.coverage) strictly_gained = true;
    }
    CHECK(strictly_gained); // somebody saw fresh surface
    CHECK(r.trajectory.back().coverage == r.coverage);
}

TEST_CASE("a duplicate-pose observation adds exactly zero coverage") {
    PlannerSettings s = base_settings();
    s.node_budget = 1;
    Planner planner(sphere_field(), RobotGeometry::drone_cube(0.1, 0.04), small_sensor(), s);
    planner.plan();
    const PlanNode& root = planner.tree().node(0);
    REQUIRE(root.local.has_value());

    // re-observe from the root pose with a different head seed
    const DepthImage obs =
        simulate_observation(sphere_field(), root.q, small_sensor(), s.march);
    const LocalSdf dup = represent_observation(obs, sphere_field(), s.local_train, 4242);
    const SurfacePointSet pts = local_surface_points(dup);
    const AncestorObservation anc{&root.box, &*root.local};
    const CoverageResult r = total_coverage(pts, dup.box(), {&anc, 1}, root.coverage,
                                            planner.global_surface_count(), s.coverage_eps);
    CHECK(r.surviving == 0);
    CHECK(r.coverage == root.coverage);
}

TEST_CASE("planning is deterministic under the seed") {
    PlannerSettings s = base_settings();
    s.node_budget = 6;
    const RobotGeometry geom = RobotGeometry::drone_cube(0.1, 0.04);
    Planner a(sphere_field(), geom, small_sensor(), s);
    Planner b(sphere_field(), geom, small_sensor(), s);
    const PlanResult ra = a.plan();
    const PlanResult rb = b.plan();
    REQUIRE(ra.trajectory.size() == rb.trajectory.size());
    for (size_t i = 0; i < ra.trajectory.size(); ++i) {
        CHECK(ra.trajectory[i].q.position == rb.trajectory[i].q.position);
        CHECK(ra.trajectory[i].coverage == rb.trajectory[i].coverage);
        CHECK(ra.trajectory[i].cost == rb.trajectory[i].cost);
    }
    CHECK(tree_fingerprint(a.tree()) == tree_fingerprint(b.tree()));
}

TEST_CASE("pruning inside the loop fires on schedule and never hurts the best branch") {
    PlannerSettings s = base_settings();
    s.node_budget = 14;
    s.prune_interval = 5;
    Planner planner(sphere_field(), RobotGeometry::drone_cube(0.1, 0.04), small_sensor(), s);
    const PlanResult r = planner.plan();
    for (const long it : r.prune_iterations) CHECK(it % 5 == 0);
    CHECK(!r.prune_iterations.empty());
    // coverage history is non-decreasing through prunes
    for (size_t i = 1; i < r.history.size(); ++i)
        CHECK(r.history[i].coverage >= r.history[i - 1].coverage - 1e-15);
}

// ---------------------------------------------------------------------------
// Memory accounting

TEST_CASE("an empty tree costs exactly the field bytes") {
    const PlannerSettings s = base_settings();
    PlanTree tree(s);
    const MemoryReport r = memory_accounting(tree, sphere_field(), small_sensor());
    CHECK(r.node_bytes == 0);
    CHECK(r.baseline_bytes == sphere_field().param_count() * 4);
}

TEST_CASE("per-node bytes are exact arithmetic and resolution-independent") {
    PlannerSettings s = base_settings();
    s.node_budget = 5;
    const RobotGeometry geom = RobotGeometry::drone_cube(0.1, 0.04);

    Planner small(sphere_field(), geom, small_sensor(), s);
    small.plan();
    const MemoryReport ra = memory_accounting(small.tree(), sphere_field(), small_sensor());
    REQUIRE(ra.nodes_with_observation > 0);
    CHECK(ra.node_bytes ==
          ra.nodes_with_observation * (505 * 4 + MemoryReport::kBoxBytes +
                                       MemoryReport::kNodeHeaderBytes));

    SensorModel big = small_sensor();
    big.width = big.height = 48; // 16x the pixels
    Planner large(sphere_field(), geom, big, s);
    large.plan();
    const MemoryReport rb = memory_accounting(large.tree(), sphere_field(), big);
    REQUIRE(rb.nodes_with_observation > 0);
    CHECK(ra.node_bytes / ra.nodes_with_observation ==
          rb.node_bytes / rb.nodes_with_observation);
    CHECK(rb.explicit_bytes_per_node == 48u * 48u * 3u * 4u);
}
