#include "sdfplan/runner.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "sdfplan/brute_force.hpp"
#include "sdfplan/gradcheck.hpp"
#include "sdfplan/shapes.hpp"

namespace sdfplan {

namespace fs = std::filesystem;

namespace {

double now_seconds() {
    using Clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(Clock::now().time_since_epoch()).count();
}

std::ofstream open_text(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out.precision(12);
    return out;
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
    auto out = open_text(path);
    out << j.dump(2) << "\n";
}

nlohmann::json config_json(const RobotConfig& q) {
    return {{"position", vec3_to_json(q.position)}, {"yaw", q.yaw}, {"pitch", q.pitch}};
}

} // namespace

std::string prepare_out_dir(const RunConfig& cfg) {
    fs::path dir(cfg.out_dir);
    if (const char* root = std::getenv("SDFPLAN_OUT_ROOT"); root && dir.is_relative())
        dir = fs::path(root) / dir;
    fs::create_directories(dir);

    nlohmann::json manifest;
    manifest["tool"] = "sdfplan";
    manifest["version"] = kVersion;
    manifest["seed"] = cfg.seed;
    manifest["config_hash"] = to_hex(cfg.hash());
    manifest["config"] = cfg.to_json();
    write_json_file(dir / "manifest.json", manifest);
    return dir.string();
}

ScenePipeline prepare_scene(const RunConfig& cfg) {
    ScenePipeline p;
    p.mesh = load_mesh(cfg.scene_path, cfg.scene_format);
    if (cfg.normalize) {
        p.transform = normalize_mesh(p.mesh, cfg.field.world_box, cfg.normalize_margin);
    } else if (!cfg.field.world_box.intersects(p.mesh.bounds)) {
        throw DataError(cfg.scene_path + ": mesh lies entirely outside the world box");
    }
    // Geometry beyond the box is legitimate (it simply stays out of the
    // modeled domain); only full disjointness is an error.
    p.oracle = std::make_unique<DistanceOracle>(p.mesh, cfg.sign_mode);
    return p;
}

// ---------------------------------------------------------------------------

void run_train_env(const RunConfig& cfg, std::ostream& log) {
    const std::string dir = prepare_out_dir(cfg);
    const double t0 = now_seconds();

    ScenePipeline scene = prepare_scene(cfg);
    log << "scene: " << cfg.scene_path << " (" << scene.mesh.vertex_count() << " vertices, "
        << scene.mesh.face_count() << " faces)\n";
    if (!scene.transform.is_identity())
        log << "normalized into world box, scale " << scene.transform.scale << "\n";

    TsdfSamplingParams sampling = cfg.sampling;
    sampling.truncation = cfg.field.truncation;
    sampling.seed = cfg.seed;
    const TsdfSampleSet all = sample_tsdf_training_set(scene.mesh, *scene.oracle, sampling,
                                                       cfg.field.world_box);

    // Deterministic held-out split.
    Rng split_rng(cfg.seed ^ 0x5917ull);
    std::vector<size_t> order(all.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[split_rng.uniform_int(i)]);
    const size_t n_holdout = static_cast<size_t>(cfg.holdout_fraction *
                                                 static_cast<double>(all.size()));

    TsdfSampleSet train_set, holdout;
    train_set.truncation = holdout.truncation = all.truncation;
    const size_t n_near = cfg.sampling.n_near;
    std::vector<bool> holdout_near;
    for (size_t i = 0; i < order.size(); ++i) {
        const size_t idx = order[i];
        TsdfSampleSet& dst = i < n_holdout ? holdout : train_set;
        dst.points.push_back(all.points[idx]);
        dst.values.push_back(all.values[idx]);
        if (i < n_holdout) holdout_near.push_back(idx < n_near);
    }

    TrainSettings settings = cfg.train;
    settings.seed = cfg.seed;
    auto [field, report] = train_env_field(train_set, cfg.field, settings);
    field.set_scene_transform(scene.transform);
    const double train_seconds = now_seconds() - t0;

    // Held-out evaluation with the truncated field (the eval contract).
    double mae = 0.0, mae_near = 0.0;
    size_t near_count = 0;
    const std::vector<double> pred = eval_tsdf(field, holdout.points);
    for (size_t i = 0; i < holdout.size(); ++i) {
        const double err = std::abs(pred[i] - holdout.values[i]);
        mae += err;
        if (holdout_near[i]) {
            mae_near += err;
            ++near_count;
        }
    }
    if (holdout.size() > 0) mae /= static_cast<double>(holdout.size());
    if (near_count > 0) mae_near /= static_cast<double>(near_count);

    const fs::path out(dir);
    field.save((out / "field.ckpt").string());
    write_samples_csv((out / "samples.csv").string(), train_set);
    {
        auto loss = open_text(out / "loss.csv");
        loss << "epoch,mse\n";
        for (size_t e = 0; e < report.epoch_loss.size(); ++e)
            loss << e << "," << report.epoch_loss[e] << "\n";
    }
    nlohmann::json jr;
    jr["final_mse"] = report.final_loss;
    jr["holdout_mae"] = mae;
    jr["holdout_near_surface_mae"] = mae_near;
    jr["holdout_count"] = holdout.size();
    jr["train_count"] = train_set.size();
    jr["param_count"] = field.param_count();
    jr["head_widths"] = field.head().widths();
    jr["truncation"] = field.truncation();
    jr["scene_transform"] = {{"scale", scene.transform.scale},
                             {"translation", vec3_to_json(scene.transform.translation)}};
    write_json_file(out / "train_report.json", jr);

    log << "trained " << field.param_count() << " parameters in " << std::fixed
        << std::setprecision(1) << train_seconds << " s\n"
        << "final mse " << std::scientific << std::setprecision(3) << report.final_loss
        << ", held-out MAE " << mae << " (near-surface " << mae_near << ", bound "
        << 0.05 * field.truncation() << ")\n"
        << "checkpoint: " << (out / "field.ckpt").string() << "\n";
}

// ---------------------------------------------------------------------------

void run_plan(const RunConfig& cfg, const std::string& checkpoint_path, std::ostream& log) {
    const std::string dir = prepare_out_dir(cfg);
    EnvField field = EnvField::load(checkpoint_path);

    // The checkpoint must agree with the config it is planned under.
    if (field.config().hash.levels != cfg.field.hash.levels ||
        field.config().hash.table_size_log2 != cfg.field.hash.table_size_log2 ||
        field.config().oneblob_bins != cfg.field.oneblob_bins ||
        field.truncation() != cfg.field.truncation ||
        !(field.config().world_box.min == cfg.field.world_box.min &&
          field.config().world_box.max == cfg.field.world_box.max) ||
        field.config().cell_size != cfg.field.cell_size)
        throw InvalidInput(checkpoint_path + ": checkpoint does not match the config");

    PlannerSettings settings = cfg.planner;
    settings.seed = cfg.seed;
    Planner planner(field, cfg.robot_geometry(), cfg.sensor, settings);
    log << "global surface points: " << planner.global_surface_count() << "\n";

    const PlanResult result = planner.plan();
    log << "planned " << result.nodes_added << " nodes in " << std::fixed
        << std::setprecision(1) << result.elapsed_s << " s; coverage " << std::setprecision(4)
        << result.coverage << ", cost " << result.cost << " m\n";

    const fs::path out(dir);
    {
        nlohmann::json jt;
        jt["coverage"] = result.coverage;
        jt["cost"] = result.cost;
        const double scale = field.scene_transform().scale;
        jt["cost_original_units"] = scale != 0.0 ? result.cost / scale : result.cost;
        jt["nodes_added"] = result.nodes_added;
        jt["iterations"] = result.iterations;
        jt["rejected"] = {{"collision", result.rejected_collision},
                          {"empty_observation", result.rejected_empty_observation},
                          {"training", result.rejected_training}};
        jt["prune_iterations"] = result.prune_iterations;
        jt["trajectory"] = nlohmann::json::array();
        for (const TrajectoryPoint& p : result.trajectory) {
            nlohmann::json jp = config_json(p.q);
            jp["coverage"] = p.coverage;
            jp["cost"] = p.cost;
            jt["trajectory"].push_back(jp);
        }
        write_json_file(out / "trajectory.json", jt);
    }
    {
        auto csv = open_text(out / "trajectory.csv");
        csv << "x,y,z,yaw,pitch,coverage,cost\n";
        for (const TrajectoryPoint& p : result.trajectory)
            csv << p.q.position.x << "," << p.q.position.y << "," << p.q.position.z << ","
                << p.q.yaw << "," << p.q.pitch << "," << p.coverage << "," << p.cost << "\n";
    }
    {
        auto csv = open_text(out / "history.csv");
        csv << "iteration,elapsed_s,nodes,coverage,cost\n";
        for (const HistoryRow& r : result.history)
            csv << r.iteration << "," << r.elapsed_s << "," << r.nodes << "," << r.coverage
                << "," << r.cost << "\n";
    }
    {
        nlohmann::json jm;
        jm["field_param_bytes"] = result.memory.field_param_bytes;
        jm["node_count"] = result.memory.node_count;
        jm["nodes_with_observation"] = result.memory.nodes_with_observation;
        jm["node_bytes"] = result.memory.node_bytes;
        jm["baseline_bytes"] = result.memory.baseline_bytes;
        jm["peak_baseline_bytes"] = result.peak_baseline_bytes;
        jm["explicit_bytes_per_node"] = result.memory.explicit_bytes_per_node;
        jm["explicit_to_implicit_ratio"] = result.memory.explicit_to_implicit_ratio;
        write_json_file(out / "memory_report.json", jm);
    }
    {
        // Covered/uncovered split of the global surface under the final branch.
        const auto ancestors = planner.best_chain_observations();
        std::vector<Vec3> covered, uncovered;
        for (const Vec3& p : planner.global_surface().points) {
            (point_covered(p, ancestors, settings.coverage_eps) ? covered : uncovered)
                .push_back(p);
        }
        write_ply_points((out / "covered.ply").string(), covered);
        write_ply_points((out / "uncovered.ply").string(), uncovered);
        log << "covered surface points: " << covered.size() << " / "
            << planner.global_surface_count() << "\n";
    }
}

// ---------------------------------------------------------------------------

void run_export_isosurface(const std::string& checkpoint_path, const std::string& out_path,
                           double cell_size_override, std::ostream& log) {
    const EnvField field = EnvField::load(checkpoint_path);
    const GridSpec grid = cell_size_override > 0.0
                              ? GridSpec::covering(field.world_box(), cell_size_override)
                              : field.grid();
    const TriangleMesh mesh =
        extract_isosurface_mesh(batch_eval_of(field), grid, GridRange::full(grid));
    if (mesh.faces.empty()) throw DegenerateField("no isosurface found in the field");
    write_ply_mesh(out_path, mesh);
    log << "isosurface: " << mesh.vertex_count() << " vertices, " << mesh.face_count()
        << " faces -> " << out_path << "\n";
}

// ---------------------------------------------------------------------------

namespace {

struct CheckRow {
    std::string name;
    bool pass;
    std::string detail;
};

void print_rows(std::ostream& out, const std::vector<CheckRow>& rows) {
    size_t width = 0;
    for (const CheckRow& r : rows) width = std::max(width, r.name.size());
    for (const CheckRow& r : rows)
        out << (r.pass ? "[PASS] " : "[FAIL] ") << std::left << std::setw(static_cast<int>(width))
            << r.name << "  " << r.detail << "\n";
}

} // namespace

bool run_verify(const std::optional<std::string>& checkpoint_path, bool quick,
                std::ostream& out) {
    std::vector<CheckRow> rows;
    std::ostringstream detail;
    const size_t n_queries = quick ? 200 : 1000;

    const TriangleMesh sphere = make_icosphere({0.0, 0.0, 0.0}, 1.0, 3);
    const DistanceOracle oracle(sphere, SignMode::RayParity);
    const Aabb box{{-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}};
    Rng rng(20240915);

    { // accelerated vs brute-force signed distance
        const double t0 = now_seconds();
        double worst = 0.0;
        bool signs_ok = true;
        for (size_t i = 0; i < n_queries; ++i) {
            const Vec3 p = rng.uniform_in(box);
            const double fast = oracle.signed_distance(p);
            const double slow = brute::signed_distance(sphere, p);
            worst = std::max(worst, std::abs(std::abs(fast) - std::abs(slow)));
            if (fast * slow < 0.0) signs_ok = false;
        }
        detail.str("");
        detail << n_queries << " queries, max |d| error " << std::scientific
               << std::setprecision(2) << worst << ", " << std::fixed << std::setprecision(2)
               << now_seconds() - t0 << " s";
        rows.push_back({"distance oracle vs brute force", worst < 1e-6 && signs_ok,
                        detail.str()});
    }
    { // accelerated vs brute-force ray casting
        double worst = 0.0;
        bool classes_ok = true;
        for (size_t i = 0; i < n_queries; ++i) {
            const Vec3 o = rng.uniform_in(box);
            const Vec3 d = rng.unit_vector();
            const auto fast = oracle.ray_cast(o, d, 3.0);
            const auto slow = brute::ray_cast(sphere, o, d, 3.0);
            if (fast.has_value() != slow.has_value()) classes_ok = false;
            else if (fast) worst = std::max(worst, std::abs(*fast - *slow));
        }
        detail.str("");
        detail << n_queries << " rays, max hit-distance error " << std::scientific
               << std::setprecision(2) << worst;
        rows.push_back({"raycast vs brute force", classes_ok && worst < 1e-6, detail.str()});
    }
    { // gradients vs central finite differences
        const int configs = quick ? 4 : 10;
        double worst = 0.0;
        for (int i = 0; i < configs; ++i) {
            HashGridConfig hc;
            hc.levels = 3;
            hc.table_size_log2 = 8;
            hc.base_resolution = 4;
            HashGridEncoder enc(hc, box);
            enc.init_params(rng, 0.5);
            worst = std::max(worst, gradcheck_hashgrid(enc, rng));

            MlpHead head({7, 9, 5, 1});
            head.init_params(rng);
            worst = std::max(worst, gradcheck_mlp(head, rng));
        }
        detail.str("");
        detail << configs << " random configurations, worst relative error " << std::scientific
               << std::setprecision(2) << worst;
        rows.push_back({"gradients vs finite differences", worst < 1e-4, detail.str()});
    }
    { // incremental coverage vs explicit set union, on a small trained field
        EnvFieldConfig fc;
        fc.world_box = box;
        fc.truncation = 0.1;
        fc.cell_size = 0.05;
        fc.hash.table_size_log2 = 11;
        fc.hash.base_resolution = 8;
        fc.hash.growth = 1.4;

        TsdfSampleSet samples;
        samples.truncation = fc.truncation;
        const size_t n_samples = quick ? 2500 : 6000;
        Rng srng(7);
        for (size_t i = 0; i < n_samples; ++i) {
            Vec3 p = srng.unit_vector() * (1.0 + srng.uniform(-0.2, 0.2));
            if (i % 5 == 0) p = srng.uniform_in(box);
            samples.points.push_back(box.clamp(p));
            samples.values.push_back(clamp(norm(samples.points.back()) - 1.0, -fc.truncation,
                                           fc.truncation));
        }
        TrainSettings ts;
        ts.epochs = quick ? 30 : 60;
        ts.batch_size = 1024;
        ts.seed = 11;
        auto [field, report] = train_env_field(samples, fc, ts);

        const SurfacePointSet s_e = global_surface_points(field, fc.kappa);
        SensorModel sensor;
        sensor.width = sensor.height = 24;
        sensor.range = 1.2;
        LocalTrainSettings lts;
        lts.max_iters = 150;
        lts.rays_per_step = 128;
        lts.pad = fc.cell_size;

        // Chain of overlapping views orbiting the sphere.
        std::vector<LocalSdf> locals;
        std::vector<SurfacePointSet> local_points;
        for (int i = 0; i < 5; ++i) {
            const double a = 0.35 * i;
            RobotConfig q;
            q.position = Vec3{std::cos(a), std::sin(a), 0.1} * 1.35;
            q.yaw = wrap_angle(a + kPi); // look at the center
            const DepthImage obs = simulate_observation(field, q, sensor);
            if (obs.hit_count() == 0) continue;
            locals.push_back(represent_observation(obs, field, lts, 100 + (uint64_t)i));
            local_points.push_back(local_surface_points(locals.back()));
        }

        double cov_incremental = 0.0;
        std::vector<AncestorObservation> ancestors;
        std::vector<uint64_t> union_keys;
        bool prune_matches = true;
        const double eps = fc.cell_size / 2.0;
        for (size_t i = 0; i < locals.size(); ++i) {
            const CoverageResult r = total_coverage(local_points[i], locals[i].box(), ancestors,
                                                    cov_incremental, s_e.count(), eps);
            const CoverageResult r_ref = total_coverage_unpruned(
                local_points[i], locals[i].box(), ancestors, cov_incremental, s_e.count(), eps);
            if (r.surviving != r_ref.surviving) prune_matches = false;
            cov_incremental = r.coverage;
            ancestors.push_back({&locals[i].box(), &locals[i]});
            union_keys.insert(union_keys.end(), local_points[i].edge_keys.begin(),
                              local_points[i].edge_keys.end());
        }
        std::sort(union_keys.begin(), union_keys.end());
        union_keys.erase(std::unique(union_keys.begin(), union_keys.end()), union_keys.end());
        const double cov_union = static_cast<double>(union_keys.size()) /
                                 static_cast<double>(s_e.count());
        const double gap = std::abs(cov_incremental - cov_union);
        detail.str("");
        detail << locals.size() << " chained views, incremental " << std::fixed
               << std::setprecision(4) << cov_incremental << " vs union " << cov_union
               << " (gap " << gap << "), box-prune exact: " << (prune_matches ? "yes" : "no");
        rows.push_back({"incremental coverage vs set union",
                        locals.size() == 5 && gap <= 0.02 && prune_matches, detail.str()});
    }
    if (checkpoint_path) {
        CheckRow row{"checkpoint checksum", true, *checkpoint_path};
        try {
            load_checkpoint(*checkpoint_path);
        } catch (const DataError& e) {
            row.pass = false;
            row.detail = e.what();
        }
        rows.push_back(row);
    }

    print_rows(out, rows);
    bool all = true;
    for (const CheckRow& r : rows) all = all && r.pass;
    out << (all ? "all checks passed" : "CHECKS FAILED") << "\n";
    return all;
}

} // namespace sdfplan
