#include "sdfplan/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace sdfplan {

namespace {
constexpr char kMagic[8] = {'S', 'D', 'F', 'P', 'C', 'K', 'P', '1'};
}

void save_checkpoint(const std::string& path, nlohmann::json header,
                     std::span<const double> params) {
    std::vector<float> payload(params.size());
    for (size_t i = 0; i < params.size(); ++i) payload[i] = static_cast<float>(params[i]);

    header["param_count"] = params.size();
    header["payload_fnv1a64"] =
        to_hex(fnv1a64(payload.data(), payload.size() * sizeof(float)));
    const std::string head = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint " + path);
    out.write(kMagic, sizeof(kMagic));
    const auto head_len = static_cast<uint32_t>(head.size());
    out.write(reinterpret_cast<const char*>(&head_len), sizeof(head_len));
    out.write(head.data(), static_cast<std::streamsize>(head.size()));
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size() * sizeof(float)));
    if (!out) throw DataError("short write on checkpoint " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("checkpoint not found: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw DataError(path + ": not a checkpoint file");
    uint32_t head_len = 0;
    in.read(reinterpret_cast<char*>(&head_len), sizeof(head_len));
    std::string head(head_len, '\0');
    in.read(head.data(), head_len);
    if (!in) throw DataError(path + ": truncated checkpoint header");

    Checkpoint ckpt;
    try {
        ckpt.header = nlohmann::json::parse(head);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": bad checkpoint header: " + e.what());
    }
    const auto count = ckpt.header.at("param_count").get<size_t>();
    std::vector<float> payload(count);
    in.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(count * sizeof(float)));
    if (!in) throw DataError(path + ": truncated checkpoint payload");

    const std::string expect = ckpt.header.at("payload_fnv1a64").get<std::string>();
    const std::string actual = to_hex(fnv1a64(payload.data(), payload.size() * sizeof(float)));
    if (expect != actual)
        throw DataError(path + ": checksum mismatch (" + actual + " != " + expect + ")");

    ckpt.params.assign(payload.begin(), payload.end());
    return ckpt;
}

nlohmann::json vec3_to_json(const Vec3& v) { return nlohmann::json::array({v.x, v.y, v.z}); }

Vec3 vec3_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3) throw DataError("expected a 3-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

nlohmann::json aabb_to_json(const Aabb& b) {
    return {{"min", vec3_to_json(b.min)}, {"max", vec3_to_json(b.max)}};
}

Aabb aabb_from_json(const nlohmann::json& j) {
    Aabb b;
    b.min = vec3_from_json(j.at("min"));
    b.max = vec3_from_json(j.at("max"));
    if (!b.valid()) throw DataError("box min exceeds max");
    return b;
}

} // namespace sdfplan
