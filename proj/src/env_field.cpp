#include "sdfplan/env_field.hpp"

namespace sdfplan {

namespace {

std::vector<int> head_widths(const EnvFieldConfig& cfg) {
    std::vector<int> w;
    w.push_back(static_cast<int>(cfg.feature_width()));
    w.insert(w.end(), cfg.head_hidden.begin(), cfg.head_hidden.end());
    w.push_back(1);
    return w;
}

} // namespace

EnvField::EnvField(const EnvFieldConfig& cfg, uint64_t seed)
    : cfg_(cfg), seed_(seed), grid_(GridSpec::covering(cfg.world_box, cfg.cell_size)),
      hash_(cfg.hash, cfg.world_box), oneblob_(cfg.oneblob_bins, cfg.world_box),
      head_(head_widths(cfg)) {
    if (cfg.truncation <= 0.0) throw InvalidInput("truncation must be positive");
    Rng rng(seed);
    hash_.init_params(rng);
    head_.init_params(rng);
}

void EnvField::features(const Vec3& p, std::span<double> out) const {
    hash_.encode(p, out);
    oneblob_.encode(p, out.subspan(hash_.output_width()));
}

void EnvField::features_with_tape(const Vec3& p, std::span<double> out,
                                  std::vector<HashGridEncoder::Touch>& tape) const {
    hash_.encode_with_tape(p, out, tape);
    oneblob_.encode(p, out.subspan(hash_.output_width()));
}

double EnvField::eval(const Vec3& p) const {
    thread_local std::vector<double> feat;
    feat.resize(feature_width());
    features(p, feat);
    return clamp(head_.forward(feat), -cfg_.truncation, cfg_.truncation);
}

void EnvField::eval_batch(std::span<const Vec3> points, std::span<double> out) const {
    thread_local std::vector<double> feat;
    feat.resize(feature_width());
    for (size_t i = 0; i < points.size(); ++i) {
        features(points[i], feat);
        out[i] = clamp(head_.forward(feat), -cfg_.truncation, cfg_.truncation);
    }
}

uint64_t EnvField::extractor_checksum() const {
    const auto& p = hash_.params();
    return fnv1a64(p.data(), p.size() * sizeof(double));
}

void EnvField::save(const std::string& path) const {
    nlohmann::json header;
    header["kind"] = "env_field";
    header["seed"] = seed_;
    header["truncation"] = cfg_.truncation;
    header["world_box"] = aabb_to_json(cfg_.world_box);
    header["cell_size"] = cfg_.cell_size;
    header["kappa"] = cfg_.kappa;
    header["encoder"] = {
        {"levels", cfg_.hash.levels},
        {"features_per_level", cfg_.hash.features_per_level},
        {"table_size_log2", cfg_.hash.table_size_log2},
        {"base_resolution", cfg_.hash.base_resolution},
        {"growth", cfg_.hash.growth},
        {"oneblob_bins", cfg_.oneblob_bins},
    };
    header["head_widths"] = head_.widths();
    header["scene_transform"] = {{"scale", transform_.scale},
                                 {"translation", vec3_to_json(transform_.translation)}};

    std::vector<double> params;
    params.reserve(param_count());
    params.insert(params.end(), hash_.params().begin(), hash_.params().end());
    params.insert(params.end(), head_.params().begin(), head_.params().end());
    save_checkpoint(path, std::move(header), params);
}

EnvField EnvField::load(const std::string& path) {
    const Checkpoint ckpt = load_checkpoint(path);
    const auto& h = ckpt.header;
    if (h.value("kind", "") != "env_field")
        throw DataError(path + ": checkpoint is not an environment field");

    EnvFieldConfig cfg;
    const auto& enc = h.at("encoder");
    cfg.hash.levels = enc.at("levels").get<int>();
    cfg.hash.features_per_level = enc.at("features_per_level").get<int>();
    cfg.hash.table_size_log2 = enc.at("table_size_log2").get<int>();
    cfg.hash.base_resolution = enc.at("base_resolution").get<int>();
    cfg.hash.growth = enc.at("growth").get<double>();
    cfg.oneblob_bins = enc.at("oneblob_bins").get<int>();
    cfg.truncation = h.at("truncation").get<double>();
    cfg.world_box = aabb_from_json(h.at("world_box"));
    cfg.cell_size = h.at("cell_size").get<double>();
    cfg.kappa = h.value("kappa", 1.0);

    const auto widths = h.at("head_widths").get<std::vector<int>>();
    if (widths.size() < 2 || widths.front() != static_cast<int>(cfg.feature_width()))
        throw DataError(path + ": head widths do not match the encoder configuration");
    cfg.head_hidden.assign(widths.begin() + 1, widths.end() - 1);

    EnvField field(cfg, h.at("seed").get<uint64_t>());
    if (ckpt.params.size() != field.param_count())
        throw DataError(path + ": parameter count mismatch");
    std::copy(ckpt.params.begin(),
              ckpt.params.begin() + static_cast<std::ptrdiff_t>(field.hash_.param_count()),
              field.hash_.params().begin());
    std::copy(ckpt.params.begin() + static_cast<std::ptrdiff_t>(field.hash_.param_count()),
              ckpt.params.end(), field.head_.params().begin());

    if (h.contains("scene_transform")) {
        field.transform_.scale = h["scene_transform"].at("scale").get<double>();
        field.transform_.translation = vec3_from_json(h["scene_transform"].at("translation"));
    }
    return field;
}

std::vector<double> eval_tsdf(const TsdfField& field, std::span<const Vec3> points) {
    std::vector<double> out(points.size());
    field.eval_batch(points, out);
    return out;
}

SurfacePointSet global_surface_points(const TsdfField& field, double kappa) {
    const GridSpec& grid = field.grid();
    SurfacePointSet set = extract_surface_points(batch_eval_of(field), grid,
                                                 GridRange::full(grid),
                                                 kappa * grid.cell_size);
    if (set.count() == 0)
        throw DegenerateField("field has no zero isosurface inside the grid");
    return set;
}

} // namespace sdfplan
