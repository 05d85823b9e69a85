#include "sdfplan/planner.hpp"

namespace sdfplan {

double config_distance(const RobotConfig& a, const RobotConfig& b, const PlannerSettings& s) {
    return norm(a.position - b.position) +
           s.angular_weight * (std::abs(angle_diff(a.yaw, b.yaw)) + std::abs(a.pitch - b.pitch));
}

int PlanTree::add_node(PlanNode n) {
    const int id = static_cast<int>(nodes_.size());
    int count = 1; // self
    for (size_t i = 0; i < nodes_.size(); ++i) {
        if (config_distance(nodes_[i].q, n.q, settings_) < settings_.crowding_radius) {
            ++crowd_[i];
            ++count;
        }
    }
    if (n.parent >= 0) nodes_[static_cast<size_t>(n.parent)].children.push_back(id);
    nodes_.push_back(std::move(n));
    crowd_.push_back(count);
    return id;
}

int PlanTree::best_leaf() const {
    int best = 0;
    bool found = false;
    for (size_t i = 0; i < nodes_.size(); ++i) {
        if (!nodes_[i].is_leaf()) continue;
        if (!found) {
            best = static_cast<int>(i);
            found = true;
            continue;
        }
        const PlanNode& cand = nodes_[i];
        const PlanNode& cur = nodes_[static_cast<size_t>(best)];
        if (cand.coverage > cur.coverage ||
            (cand.coverage == cur.coverage && cand.cost < cur.cost)) {
            best = static_cast<int>(i);
        }
    }
    return best;
}

std::vector<int> PlanTree::chain_to(int id) const {
    std::vector<int> chain;
    for (int cur = id; cur >= 0; cur = nodes_[static_cast<size_t>(cur)].parent)
        chain.push_back(cur);
    std::reverse(chain.begin(), chain.end());
    return chain;
}

void PlanTree::prune_to_best_branch() {
    if (nodes_.empty()) return;
    const std::vector<int> chain = chain_to(best_leaf());
    std::vector<PlanNode> kept;
    kept.reserve(chain.size());
    for (size_t i = 0; i < chain.size(); ++i) {
        PlanNode n = std::move(nodes_[static_cast<size_t>(chain[i])]);
        n.parent = static_cast<int>(i) - 1;
        n.children.clear();
        if (i + 1 < chain.size()) n.children.push_back(static_cast<int>(i) + 1);
        kept.push_back(std::move(n));
    }
    nodes_ = std::move(kept);
    // Crowding counts are recomputed over the surviving chain.
    crowd_.assign(nodes_.size(), 0);
    for (size_t i = 0; i < nodes_.size(); ++i) {
        for (size_t j = 0; j < nodes_.size(); ++j) {
            if (config_distance(nodes_[i].q, nodes_[j].q, settings_) < settings_.crowding_radius)
                ++crowd_[i];
        }
    }
}

int select_expansion_node(const PlanTree& tree, const PlannerSettings& settings, Rng& rng) {
    if (tree.empty()) throw InvalidInput("cannot select from an empty tree");
    std::vector<double> cum(tree.size());
    double total = 0.0;
    for (size_t i = 0; i < tree.size(); ++i) {
        total += 1.0 / static_cast<double>(tree.crowding(static_cast<int>(i))) +
                 settings.alpha * tree.node(static_cast<int>(i)).coverage;
        cum[i] = total;
    }
    const double u = rng.uniform() * total;
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    return static_cast<int>(std::min<size_t>(static_cast<size_t>(it - cum.begin()),
                                             tree.size() - 1));
}

RobotConfig sample_child_config(const RobotConfig& parent, const PlannerSettings& settings,
                                const Aabb& world_box, Rng& rng) {
    RobotConfig q;
    q.position = world_box.clamp(parent.position + rng.in_unit_ball() * settings.edge_length);
    q.yaw = wrap_angle(parent.yaw + rng.uniform(-settings.max_yaw_step, settings.max_yaw_step));
    q.pitch = clamp(parent.pitch + rng.uniform(-settings.max_pitch_step, settings.max_pitch_step),
                    -kPi / 2.0, kPi / 2.0);
    return q;
}

MemoryReport memory_accounting(const PlanTree& tree, const EnvField& field,
                               const SensorModel& sensor) {
    MemoryReport r;
    r.field_param_bytes = field.param_count() * sizeof(float);
    r.node_count = tree.size();
    for (const PlanNode& n : tree.nodes()) {
        if (!n.local) continue;
        ++r.nodes_with_observation;
        r.node_bytes += n.local->param_count() * sizeof(float) + MemoryReport::kBoxBytes +
                        MemoryReport::kNodeHeaderBytes;
    }
    r.baseline_bytes = r.field_param_bytes + r.node_bytes;
    r.explicit_bytes_per_node = static_cast<size_t>(sensor.width) *
                                static_cast<size_t>(sensor.height) * 3 * sizeof(float);
    if (r.nodes_with_observation > 0) {
        const double per_node = static_cast<double>(r.node_bytes) /
                                static_cast<double>(r.nodes_with_observation);
        r.explicit_to_implicit_ratio = static_cast<double>(r.explicit_bytes_per_node) / per_node;
    }
    return r;
}

Planner::Planner(const EnvField& field, const RobotGeometry& geom, const SensorModel& sensor,
                 const PlannerSettings& settings)
    : field_(field), geom_(geom), sensor_(sensor), settings_(settings), tree_(settings),
      rng_(settings.seed) {
    settings_.validate();
    sensor_.validate();
    if (settings_.xi >= field.truncation())
        throw InvalidInput("xi must be below the field truncation");
    s_e_ = global_surface_points(field, field.config().kappa);
    s_e_count_ = s_e_.count();
    place_root();
}

void Planner::place_root() {
    RobotConfig root = settings_.root;
    root.normalize_angles();
    if (!collision_free_config(field_, root, geom_, settings_.xi))
        throw InvalidInput("root configuration is in collision");

    PlanNode n;
    n.q = root;
    n.parent = -1;
    n.cost = 0.0;
    const DepthImage obs = simulate_observation(field_, root, sensor_, settings_.march);
    if (obs.hit_count() > 0) {
        LocalSdf local =
            represent_observation(obs, field_, settings_.local_train, rng_.next_u64());
        const SurfacePointSet pts = local_surface_points(local);
        const CoverageResult cov = total_coverage(pts, local.box(), {}, 0.0, s_e_count_,
                                                  settings_.coverage_eps);
        n.box = local.box();
        n.local.emplace(std::move(local));
        n.coverage = cov.coverage;
    }
    tree_.add_node(std::move(n));
}

std::vector<AncestorObservation> Planner::chain_observations(int up_to) const {
    std::vector<AncestorObservation> obs;
    for (const int id : tree_.chain_to(up_to)) {
        const PlanNode& n = tree_.node(id);
        if (n.local) obs.push_back({&n.box, &*n.local});
    }
    return obs;
}

std::vector<AncestorObservation> Planner::best_chain_observations() const {
    return chain_observations(tree_.best_leaf());
}

ExpandOutcome Planner::expand_once() {
    const int parent_id = select_expansion_node(tree_, settings_, rng_);
    const PlanNode& parent = tree_.node(parent_id);
    RobotConfig child_q = sample_child_config(parent.q, settings_, field_.world_box(), rng_);
    const uint64_t local_seed = rng_.next_u64();

    if (!collision_free_segment(field_, parent.q, child_q, geom_, settings_.xi,
                                settings_.collision_step))
        return {ExpandOutcome::Kind::RejectedCollision};

    const DepthImage obs = simulate_observation(field_, child_q, sensor_, settings_.march);
    if (obs.hit_count() == 0) return {ExpandOutcome::Kind::RejectedEmptyObservation};

    std::optional<LocalSdf> trained;
    try {
        trained.emplace(represent_observation(obs, field_, settings_.local_train, local_seed));
    } catch (const TrainingError&) {
        return {ExpandOutcome::Kind::RejectedTraining};
    }
    LocalSdf local = std::move(*trained);

    const SurfacePointSet pts = local_surface_points(local);
    const auto ancestors = chain_observations(parent_id);
    const CoverageResult cov = total_coverage(pts, local.box(), ancestors, parent.coverage,
                                              s_e_count_, settings_.coverage_eps);
    // Local surface points go out of scope here; only theta_P and the box
    // persist on the node.
    PlanNode n;
    n.q = child_q;
    n.box = local.box();
    n.local.emplace(std::move(local));
    n.coverage = cov.coverage;
    n.cost = parent.cost + norm(child_q.position - parent.q.position);
    n.parent = parent_id;
    const int id = tree_.add_node(std::move(n));
    return {ExpandOutcome::Kind::Added, id};
}

PlanResult Planner::plan() {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    const auto elapsed = [&]() {
        return std::chrono::duration<double>(Clock::now() - start).count();
    };

    PlanResult result;
    result.peak_baseline_bytes = memory_accounting(tree_, field_, sensor_).baseline_bytes;

    while (true) {
        // Node budget counts the whole tree over the run (root + additions);
        // pruning releases storage but does not refund the budget.
        if (1 + result.nodes_added >= settings_.node_budget) break;
        if (elapsed() >= settings_.time_budget_s) break;
        if (settings_.iteration_budget > 0 && tree_.iteration >= settings_.iteration_budget)
            break;

        ++tree_.iteration;
        const ExpandOutcome outcome = expand_once();
        switch (outcome.kind) {
            case ExpandOutcome::Kind::Added: ++result.nodes_added; break;
            case ExpandOutcome::Kind::RejectedCollision: ++result.rejected_collision; break;
            case ExpandOutcome::Kind::RejectedEmptyObservation:
                ++result.rejected_empty_observation;
                break;
            case ExpandOutcome::Kind::RejectedTraining: ++result.rejected_training; break;
        }

        const MemoryReport mem = memory_accounting(tree_, field_, sensor_);
        result.peak_baseline_bytes = std::max(result.peak_baseline_bytes, mem.baseline_bytes);

        const int best = tree_.best_leaf();
        result.history.push_back({tree_.iteration, elapsed(), tree_.size(),
                                  tree_.node(best).coverage, tree_.node(best).cost});

        if (settings_.prune_interval > 0 && tree_.iteration % settings_.prune_interval == 0) {
            tree_.prune_to_best_branch();
            result.prune_iterations.push_back(tree_.iteration);
        }
        if (mem.baseline_bytes > settings_.memory_budget_bytes) break;
    }

    result.iterations = tree_.iteration;
    result.elapsed_s = elapsed();
    const std::vector<int> chain = tree_.chain_to(tree_.best_leaf());
    for (const int id : chain) {
        const PlanNode& n = tree_.node(id);
        result.trajectory.push_back({n.q, n.coverage, n.cost});
    }
    result.coverage = result.trajectory.back().coverage;
    result.cost = result.trajectory.back().cost;
    result.memory = memory_accounting(tree_, field_, sensor_);
    return result;
}

} // namespace sdfplan
