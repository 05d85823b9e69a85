// Shared fixtures: procedural meshes, oracles, and small trained fields. The
// trained fields are built once per test binary (seeded, deterministic) and
// shared across cases to keep the suite fast.

#pragma once

#include <string>

#include "sdfplan/distance_oracle.hpp"
#include "sdfplan/env_field.hpp"
#include "sdfplan/train_env.hpp"

namespace sdfplan::testing {

std::string data_path(const std::string& name);

const TriangleMesh& sphere_mesh();        // icosphere, radius 1, 1280 faces
const DistanceOracle& sphere_oracle();
const TriangleMesh& cube_mesh();          // cube [-0.5, 0.5]^3
const DistanceOracle& cube_oracle();

// Light training configs: full-width extractor (505-parameter heads stay
// solvable) with a reduced table so each trains in a few seconds.
EnvFieldConfig small_field_config(const Aabb& box, double cell_size);

const EnvField& sphere_field();           // trained on the sphere, box 1.5
const EnvField& cube_field();             // trained on the cube, box 1.0

} // namespace sdfplan::testing
