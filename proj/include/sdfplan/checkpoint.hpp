// checkpoint.hpp — parameter serialization: a JSON header followed by a flat
// little-endian float32 payload, checksummed with FNV-1a so corruption is
// detectable. Round-tripping a file is bit-exact.

#pragma once

#include <nlohmann/json.hpp>

#include "sdfplan/core.hpp"

namespace sdfplan {

struct Checkpoint {
    nlohmann::json header;
    std::vector<double> params; // float32 values widened to double
};

// `header` gains "param_count" and "payload_fnv1a64" fields on save.
void save_checkpoint(const std::string& path, nlohmann::json header,
                     std::span<const double> params);

// Verifies magic and payload checksum; throws DataError on mismatch.
Checkpoint load_checkpoint(const std::string& path);

// JSON helpers shared by checkpoint headers and configs.
nlohmann::json aabb_to_json(const Aabb& b);
Aabb aabb_from_json(const nlohmann::json& j);
nlohmann::json vec3_to_json(const Vec3& v);
Vec3 vec3_from_json(const nlohmann::json& j);

} // namespace sdfplan
