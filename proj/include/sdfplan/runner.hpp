// runner.hpp — command implementations behind the CLI. Each run writes a
// manifest (config hash, seed, version) sufficient to reproduce its outputs
// bit-for-bit; wall-clock timings go only to the log and the history CSV.

#pragma once

#include <iosfwd>
#include <optional>

#include "sdfplan/config.hpp"

namespace sdfplan {

inline constexpr const char* kVersion = "0.1.0";

struct ScenePipeline {
    TriangleMesh mesh;
    SceneTransform transform;
    std::unique_ptr<DistanceOracle> oracle;
};

// Loads, optionally normalizes into the world box, and builds the oracle.
ScenePipeline prepare_scene(const RunConfig& cfg);

// train-env: checkpoint + loss curve + held-out error report + manifest.
void run_train_env(const RunConfig& cfg, std::ostream& log);

// plan: trajectory JSON/CSV, coverage history CSV, covered/uncovered PLYs,
// memory report JSON, manifest.
void run_plan(const RunConfig& cfg, const std::string& checkpoint_path, std::ostream& log);

// export-isosurface: triangle PLY of the zero level set.
void run_export_isosurface(const std::string& checkpoint_path, const std::string& out_path,
                           double cell_size_override, std::ostream& log);

// verify: prints one PASS/FAIL line per oracle check; returns true when all
// pass. `quick` trims the sample counts.
bool run_verify(const std::optional<std::string>& checkpoint_path, bool quick,
                std::ostream& out);

// Resolves cfg.out_dir under the SDFPLAN_OUT_ROOT environment variable (the
// only environment input), creates it, and writes manifest.json.
std::string prepare_out_dir(const RunConfig& cfg);

} // namespace sdfplan
