// planner.hpp — coverage-biased tree planner. Nodes carry the 4-tuple
// (configuration, snapped box, local head, cumulative coverage); expansion is
// sampled with probability proportional to 1/N_d + alpha * cov, and the tree
// is periodically pruned to its best branch.

#pragma once

#include <chrono>
#include <optional>

#include "sdfplan/collision.hpp"
#include "sdfplan/coverage.hpp"

namespace sdfplan {

struct PlanNode {
    RobotConfig q;
    SnappedBoundingBox box;        // meaningful only when `local` is set
    std::optional<LocalSdf> local; // theta_P; absent if the view had no hits
    double coverage = 0.0;
    double cost = 0.0; // positional path length from the root
    int parent = -1;
    std::vector<int> children;

    bool is_leaf() const { return children.empty(); }
};

struct PlannerSettings {
    double alpha = 10.0;            // coverage bias weight
    double crowding_radius = 0.4;   // d, meters (angles weighted below)
    double angular_weight = 0.1;    // meters per radian in the config metric
    int prune_interval = 200;       // iterations; 0 disables pruning
    double edge_length = 0.4;       // sampling ball radius, meters
    double max_yaw_step = kPi / 4.0;
    double max_pitch_step = kPi / 8.0;
    double collision_step = 0.05;
    double xi = 0.07;               // clearance margin, must be < truncation
    double coverage_eps = 0.025;    // |f_P| membership threshold
    double time_budget_s = 600.0;
    size_t node_budget = 2000;
    size_t memory_budget_bytes = size_t{1} << 30;
    long iteration_budget = 0;      // 0 = unlimited
    uint64_t seed = 1;
    RobotConfig root;
    LocalTrainSettings local_train;
    MarchParams march;

    void validate() const {
        if (alpha <= 0.0 || crowding_radius <= 0.0) throw InvalidInput("alpha and d must be > 0");
        if (prune_interval < 0) throw InvalidInput("prune interval must be >= 1 (or 0 to disable)");
        if (node_budget == 0) throw InvalidInput("node budget must be positive");
    }
};

// Positional Euclidean distance plus angular_weight * shortest-arc terms.
double config_distance(const RobotConfig& a, const RobotConfig& b, const PlannerSettings& s);

class PlanTree {
public:
    explicit PlanTree(const PlannerSettings& settings) : settings_(settings) {}

    size_t size() const { return nodes_.size(); }
    bool empty() const { return nodes_.empty(); }
    const PlanNode& node(int id) const { return nodes_[static_cast<size_t>(id)]; }
    PlanNode& node(int id) { return nodes_[static_cast<size_t>(id)]; }
    const std::vector<PlanNode>& nodes() const { return nodes_; }

    int crowding(int id) const { return crowd_[static_cast<size_t>(id)]; }

    // Links the node under its parent and maintains crowding counts.
    int add_node(PlanNode n);

    // Best = max coverage, ties by lower cost, then lower id; over leaves.
    int best_leaf() const;
    std::vector<int> chain_to(int id) const; // root .. id

    // Keeps only the root-to-best-leaf chain, releasing all other storage.
    void prune_to_best_branch();

    long iteration = 0;

private:
    PlannerSettings settings_;
    std::vector<PlanNode> nodes_;
    std::vector<int> crowd_;
};

// Draws a node id with probability proportional to 1/N_d + alpha * cov.
int select_expansion_node(const PlanTree& tree, const PlannerSettings& settings, Rng& rng);

// Uniform position in the edge-length ball around the parent, yaw/pitch
// steps uniform within their bounds, clamped to the world box and ranges.
RobotConfig sample_child_config(const RobotConfig& parent, const PlannerSettings& settings,
                                const Aabb& world_box, Rng& rng);

struct ExpandOutcome {
    enum class Kind { Added, RejectedCollision, RejectedEmptyObservation, RejectedTraining };
    Kind kind = Kind::RejectedCollision;
    int node_id = -1;

    bool added() const { return kind == Kind::Added; }
};

struct MemoryReport {
    // Per-node persistent storage: head parameters as serialized float32 plus
    // the snapped box corners and the fixed head-layout header.
    static constexpr size_t kBoxBytes = 6 * sizeof(double);
    static constexpr size_t kNodeHeaderBytes = 16;

    size_t field_param_bytes = 0;
    size_t node_count = 0;
    size_t nodes_with_observation = 0;
    size_t node_bytes = 0;
    size_t baseline_bytes = 0; // field + nodes

    // Explicit-storage comparison: a fully-hit float32 xyz point cloud.
    size_t explicit_bytes_per_node = 0;
    double explicit_to_implicit_ratio = 0.0;
};

MemoryReport memory_accounting(const PlanTree& tree, const EnvField& field,
                               const SensorModel& sensor);

struct TrajectoryPoint {
    RobotConfig q;
    double coverage = 0.0;
    double cost = 0.0;
};

struct HistoryRow {
    long iteration = 0;
    double elapsed_s = 0.0;
    size_t nodes = 0;
    double coverage = 0.0;
    double cost = 0.0;
};

struct PlanResult {
    std::vector<TrajectoryPoint> trajectory;
    double coverage = 0.0;
    double cost = 0.0;
    size_t nodes_added = 0;
    size_t rejected_collision = 0;
    size_t rejected_empty_observation = 0;
    size_t rejected_training = 0;
    long iterations = 0;
    std::vector<long> prune_iterations;
    std::vector<HistoryRow> history;
    size_t peak_baseline_bytes = 0;
    double elapsed_s = 0.0;
    MemoryReport memory;
};

class Planner {
public:
    Planner(const EnvField& field, const RobotGeometry& geom, const SensorModel& sensor,
            const PlannerSettings& settings);

    // Expansion loop with pruning and budget checks (budgets are evaluated
    // between expansions; an expansion never aborts mid-primitive).
    PlanResult plan();

    // Single expansion attempt; exposed for tests.
    ExpandOutcome expand_once();

    PlanTree& tree() { return tree_; }
    const PlanTree& tree() const { return tree_; }
    Rng& rng() { return rng_; }
    size_t global_surface_count() const { return s_e_count_; }
    const SurfacePointSet& global_surface() const { return s_e_; }

    // (box, head) pairs along the current best branch, root-first.
    std::vector<AncestorObservation> best_chain_observations() const;

private:
    void place_root();
    std::vector<AncestorObservation> chain_observations(int up_to) const;

    const EnvField& field_;
    RobotGeometry geom_;
    SensorModel sensor_;
    PlannerSettings settings_;
    PlanTree tree_;
    Rng rng_;
    SurfacePointSet s_e_;
    size_t s_e_count_ = 0;
};

} // namespace sdfplan
