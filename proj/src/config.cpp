#include "sdfplan/config.hpp"

#include <fstream>

namespace sdfplan {

namespace {

std::string format_to_string(MeshFormat f) {
    switch (f) {
        case MeshFormat::Auto: return "auto";
        case MeshFormat::Obj: return "obj";
        case MeshFormat::Ply: return "ply";
    }
    return "auto";
}

MeshFormat format_from_string(const std::string& s) {
    if (s == "auto") return MeshFormat::Auto;
    if (s == "obj") return MeshFormat::Obj;
    if (s == "ply") return MeshFormat::Ply;
    throw InvalidInput("unknown mesh format '" + s + "'");
}

nlohmann::json adam_to_json(const AdamWParams& a) {
    return {{"lr", a.lr},
            {"beta1", a.beta1},
            {"beta2", a.beta2},
            {"eps", a.eps},
            {"weight_decay", a.weight_decay}};
}

AdamWParams adam_from_json(const nlohmann::json& j) {
    AdamWParams a;
    a.lr = j.at("lr").get<double>();
    a.beta1 = j.at("beta1").get<double>();
    a.beta2 = j.at("beta2").get<double>();
    a.eps = j.at("eps").get<double>();
    a.weight_decay = j.at("weight_decay").get<double>();
    return a;
}

} // namespace

RunConfig RunConfig::defaults() {
    RunConfig c;
    c.field.world_box = {{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}};
    c.field.cell_size = 0.025;
    c.field.truncation = 0.1;
    c.sampling.truncation = c.field.truncation;
    c.sensor.range = 1.0;
    c.planner.root.position = {0.0, 0.0, 0.0};
    return c;
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    j["scene"] = {{"path", scene_path},
                  {"format", format_to_string(scene_format)},
                  {"normalize", normalize},
                  {"normalize_margin", normalize_margin},
                  {"sign_mode", sign_mode == SignMode::RayParity ? "ray_parity" : "normal_vote"}};
    j["world_box"] = aabb_to_json(field.world_box);
    j["tsdf"] = {{"truncation", field.truncation}};
    j["encoder"] = {{"hash",
                     {{"levels", field.hash.levels},
                      {"features_per_level", field.hash.features_per_level},
                      {"table_size_log2", field.hash.table_size_log2},
                      {"base_resolution", field.hash.base_resolution},
                      {"growth", field.hash.growth}}},
                    {"oneblob_bins", field.oneblob_bins}};
    j["global_head"] = {{"hidden", field.head_hidden}};
    j["grid"] = {{"cell_size", field.cell_size}, {"kappa", field.kappa}};
    j["sampling"] = {{"n_near", sampling.n_near},
                     {"n_far", sampling.n_far},
                     {"near_band", sampling.near_band},
                     {"holdout_fraction", holdout_fraction}};
    j["train"] = {{"epochs", train.epochs},
                  {"batch_size", train.batch_size},
                  {"adam", adam_to_json(train.adam)}};
    j["robot"] = {{"side", robot_side}, {"control_grid_step", robot_grid_step}};
    j["sensor"] = {{"width", sensor.width},
                   {"height", sensor.height},
                   {"hfov_deg", sensor.hfov * 180.0 / kPi},
                   {"vfov_deg", sensor.vfov * 180.0 / kPi},
                   {"range", sensor.range}};
    j["observation"] = {{"pad", planner.local_train.pad},
                        {"march_step_factor", planner.march.step_factor},
                        {"bisect_iters", planner.march.bisect_iters},
                        {"local_head_params", planner.local_train.head_param_target},
                        {"local_iters", planner.local_train.max_iters},
                        {"rays_per_step", planner.local_train.rays_per_step},
                        {"visible_samples", planner.local_train.visible_samples},
                        {"occluded_samples", planner.local_train.occluded_samples},
                        {"lambda_vis", planner.local_train.lambda_vis},
                        {"lambda_occ", planner.local_train.lambda_occ},
                        {"local_adam", adam_to_json(planner.local_train.adam)},
                        {"coverage_eps", planner.coverage_eps}};
    j["planner"] = {{"alpha", planner.alpha},
                    {"crowding_radius", planner.crowding_radius},
                    {"angular_weight", planner.angular_weight},
                    {"prune_interval", planner.prune_interval},
                    {"edge_length", planner.edge_length},
                    {"max_yaw_step", planner.max_yaw_step},
                    {"max_pitch_step", planner.max_pitch_step},
                    {"collision_step", planner.collision_step},
                    {"xi", planner.xi},
                    {"time_budget_s", planner.time_budget_s},
                    {"node_budget", planner.node_budget},
                    {"memory_budget_bytes", planner.memory_budget_bytes},
                    {"iteration_budget", planner.iteration_budget},
                    {"root",
                     {{"position", vec3_to_json(planner.root.position)},
                      {"yaw", planner.root.yaw},
                      {"pitch", planner.root.pitch}}}};
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig c = defaults();
    try {
        c.seed = j.at("seed").get<uint64_t>();
        c.out_dir = j.at("out_dir").get<std::string>();

        const auto& scene = j.at("scene");
        c.scene_path = scene.at("path").get<std::string>();
        c.scene_format = format_from_string(scene.value("format", "auto"));
        c.normalize = scene.value("normalize", false);
        c.normalize_margin = scene.value("normalize_margin", 0.05);
        const std::string sign = scene.value("sign_mode", "ray_parity");
        if (sign == "ray_parity") c.sign_mode = SignMode::RayParity;
        else if (sign == "normal_vote") c.sign_mode = SignMode::NormalVote;
        else throw InvalidInput("unknown sign_mode '" + sign + "'");

        c.field.world_box = aabb_from_json(j.at("world_box"));
        c.field.truncation = j.at("tsdf").at("truncation").get<double>();
        const auto& hash = j.at("encoder").at("hash");
        c.field.hash.levels = hash.at("levels").get<int>();
        c.field.hash.features_per_level = hash.at("features_per_level").get<int>();
        c.field.hash.table_size_log2 = hash.at("table_size_log2").get<int>();
        c.field.hash.base_resolution = hash.at("base_resolution").get<int>();
        c.field.hash.growth = hash.at("growth").get<double>();
        c.field.oneblob_bins = j.at("encoder").at("oneblob_bins").get<int>();
        c.field.head_hidden = j.at("global_head").at("hidden").get<std::vector<int>>();
        c.field.cell_size = j.at("grid").at("cell_size").get<double>();
        c.field.kappa = j.at("grid").value("kappa", 1.0);

        const auto& sampling = j.at("sampling");
        c.sampling.n_near = sampling.at("n_near").get<size_t>();
        c.sampling.n_far = sampling.at("n_far").get<size_t>();
        c.sampling.near_band = sampling.value("near_band", 0.0);
        c.sampling.truncation = c.field.truncation;
        c.sampling.seed = c.seed;
        c.holdout_fraction = sampling.value("holdout_fraction", 0.1);

        const auto& train = j.at("train");
        c.train.epochs = train.at("epochs").get<int>();
        c.train.batch_size = train.at("batch_size").get<size_t>();
        c.train.adam = adam_from_json(train.at("adam"));
        c.train.seed = c.seed;

        const auto& robot = j.at("robot");
        c.robot_side = robot.at("side").get<double>();
        c.robot_grid_step = robot.value("control_grid_step", 0.04);

        const auto& sensor = j.at("sensor");
        c.sensor.width = sensor.at("width").get<int>();
        c.sensor.height = sensor.at("height").get<int>();
        c.sensor.hfov = sensor.at("hfov_deg").get<double>() * kPi / 180.0;
        c.sensor.vfov = sensor.at("vfov_deg").get<double>() * kPi / 180.0;
        c.sensor.range = sensor.at("range").get<double>();

        const auto& obs = j.at("observation");
        c.planner.local_train.pad = obs.at("pad").get<double>();
        c.planner.march.step_factor = obs.at("march_step_factor").get<double>();
        c.planner.march.bisect_iters = obs.at("bisect_iters").get<int>();
        c.planner.local_train.head_param_target = obs.at("local_head_params").get<int>();
        c.planner.local_train.max_iters = obs.at("local_iters").get<int>();
        c.planner.local_train.rays_per_step = obs.at("rays_per_step").get<size_t>();
        c.planner.local_train.visible_samples = obs.at("visible_samples").get<int>();
        c.planner.local_train.occluded_samples = obs.at("occluded_samples").get<int>();
        c.planner.local_train.lambda_vis = obs.at("lambda_vis").get<double>();
        c.planner.local_train.lambda_occ = obs.at("lambda_occ").get<double>();
        c.planner.local_train.adam = adam_from_json(obs.at("local_adam"));
        c.planner.coverage_eps = obs.at("coverage_eps").get<double>();

        const auto& planner = j.at("planner");
        c.planner.alpha = planner.at("alpha").get<double>();
        c.planner.crowding_radius = planner.at("crowding_radius").get<double>();
        c.planner.angular_weight = planner.at("angular_weight").get<double>();
        c.planner.prune_interval = planner.at("prune_interval").get<int>();
        c.planner.edge_length = planner.at("edge_length").get<double>();
        c.planner.max_yaw_step = planner.at("max_yaw_step").get<double>();
        c.planner.max_pitch_step = planner.at("max_pitch_step").get<double>();
        c.planner.collision_step = planner.at("collision_step").get<double>();
        c.planner.xi = planner.at("xi").get<double>();
        c.planner.time_budget_s = planner.at("time_budget_s").get<double>();
        c.planner.node_budget = planner.at("node_budget").get<size_t>();
        c.planner.memory_budget_bytes = planner.at("memory_budget_bytes").get<size_t>();
        c.planner.iteration_budget = planner.value("iteration_budget", 0L);
        c.planner.root.position = vec3_from_json(planner.at("root").at("position"));
        c.planner.root.yaw = planner.at("root").at("yaw").get<double>();
        c.planner.root.pitch = planner.at("root").at("pitch").get<double>();
        c.planner.seed = c.seed;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("config: ") + e.what());
    }
    return c;
}

RunConfig RunConfig::load(const std::string& path, std::span<const std::string> overrides) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("config not found: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(path + ": " + e.what());
    }
    for (const std::string& ov : overrides) apply_override(j, ov);
    RunConfig c = from_json(j);
    c.validate();
    return c;
}

void RunConfig::validate() const {
    if (field.truncation <= 0.0) throw InvalidInput("truncation must be positive");
    if (!field.world_box.valid()) throw InvalidInput("world_box is empty");
    if (field.cell_size <= 0.0) throw InvalidInput("grid cell_size must be positive");
    if (GridSpec::covering(field.world_box, field.cell_size).cell_count() >
        size_t{256} * 256 * 256)
        throw InvalidInput("global grid exceeds 256^3 cells; raise grid.cell_size");
    if (planner.xi <= 0.0 || planner.xi >= field.truncation)
        throw InvalidInput("planner.xi must lie in (0, truncation)");
    if (planner.collision_step <= 0.0 || planner.collision_step > planner.xi)
        throw InvalidInput("planner.collision_step must lie in (0, xi]");
    if (planner.coverage_eps <= 0.0) throw InvalidInput("coverage_eps must be positive");
    if (holdout_fraction < 0.0 || holdout_fraction >= 1.0)
        throw InvalidInput("holdout_fraction must lie in [0, 1)");
    if (!field.world_box.contains(planner.root.position))
        throw InvalidInput("planner root lies outside the world box");
    sensor.validate();
    planner.validate();
    // Exact parameter targets must be solvable for the configured extractor.
    MlpHead::with_param_target(static_cast<int>(field.feature_width()),
                               planner.local_train.head_param_target);
}

uint64_t RunConfig::hash() const {
    const std::string dump = to_json().dump();
    return fnv1a64(dump.data(), dump.size());
}

void apply_override(nlohmann::json& j, const std::string& assignment) {
    const size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw InvalidInput("override must look like key.path=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    nlohmann::json* cur = &j;
    size_t start = 0;
    while (true) {
        const size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) throw InvalidInput("bad override path: " + path);
        if (dot == std::string::npos) {
            nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
            (*cur)[key] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
            return;
        }
        cur = &(*cur)[key];
        start = dot + 1;
    }
}

} // namespace sdfplan
