// config.hpp — one structured config drives every command. Loads from JSON,
// round-trips losslessly, and accepts dotted-path overrides so any value can
// be pinned from the command line.

#pragma once

#include "sdfplan/env_field.hpp"
#include "sdfplan/planner.hpp"
#include "sdfplan/train_env.hpp"

namespace sdfplan {

struct RunConfig {
    uint64_t seed = 1;
    std::string out_dir = "runs/out";

    // scene
    std::string scene_path;
    MeshFormat scene_format = MeshFormat::Auto;
    bool normalize = false;
    double normalize_margin = 0.05;
    SignMode sign_mode = SignMode::RayParity;

    // field (world box, truncation, encoders, global head, lattice)
    EnvFieldConfig field;

    // training data + optimization
    TsdfSamplingParams sampling;
    double holdout_fraction = 0.1;
    TrainSettings train;

    // robot + sensor
    double robot_side = 0.1;
    double robot_grid_step = 0.04;
    SensorModel sensor;

    // planning (includes local observation training and ray marching)
    PlannerSettings planner;

    static RunConfig defaults();

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);

    // Reads a JSON config and applies `--set key.path=value` overrides.
    static RunConfig load(const std::string& path, std::span<const std::string> overrides = {});

    // Cross-field preconditions (xi < truncation, step <= xi, ...).
    void validate() const;

    // FNV-1a over the canonical (sorted-key) JSON dump.
    uint64_t hash() const;

    RobotGeometry robot_geometry() const {
        return RobotGeometry::drone_cube(robot_side, robot_grid_step);
    }
};

// Applies one "key.path=value" override in place; the value is parsed as JSON
// when possible, else taken as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

} // namespace sdfplan
