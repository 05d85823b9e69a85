#include "sdfplan/local_sdf.hpp"

#include "sdfplan/adamw.hpp"

namespace sdfplan {

void LocalSdf::save(const std::string& path) const {
    nlohmann::json header;
    header["kind"] = "local_sdf";
    header["truncation"] = field_->truncation();
    header["head_widths"] = head_.widths();
    header["box"] = {{"min", vec3_to_json(box_.min)},
                     {"max", vec3_to_json(box_.max)},
                     {"idx_min", {box_.idx_min[0], box_.idx_min[1], box_.idx_min[2]}},
                     {"idx_max", {box_.idx_max[0], box_.idx_max[1], box_.idx_max[2]}}};
    save_checkpoint(path, std::move(header), head_.params());
}

LocalSdf LocalSdf::load(const std::string& path, const EnvField& field) {
    const Checkpoint ckpt = load_checkpoint(path);
    if (ckpt.header.value("kind", "") != "local_sdf")
        throw DataError(path + ": checkpoint is not a local SDF");
    MlpHead head(ckpt.header.at("head_widths").get<std::vector<int>>());
    if (ckpt.params.size() != head.param_count())
        throw DataError(path + ": parameter count mismatch");
    head.params().assign(ckpt.params.begin(), ckpt.params.end());

    const auto& jb = ckpt.header.at("box");
    SnappedBoundingBox box;
    box.min = vec3_from_json(jb.at("min"));
    box.max = vec3_from_json(jb.at("max"));
    for (int a = 0; a < 3; ++a) {
        box.idx_min[a] = jb.at("idx_min")[static_cast<size_t>(a)].get<int>();
        box.idx_max[a] = jb.at("idx_max")[static_cast<size_t>(a)].get<int>();
    }
    return LocalSdf(field, std::move(head), box);
}

LocalSdf represent_observation(const DepthImage& obs, const EnvField& field,
                               const LocalTrainSettings& settings, uint64_t seed) {
    std::vector<size_t> hit_rays;
    for (size_t i = 0; i < obs.pixel_count(); ++i)
        if (obs.is_hit(i)) hit_rays.push_back(i);
    if (hit_rays.empty()) throw EmptyObservation("cannot represent an observation with no hits");

    const SnappedBoundingBox box = observation_bounding_box(obs, field, settings.pad);

    Rng rng(seed);
    MlpHead head = MlpHead::with_param_target(static_cast<int>(field.feature_width()),
                                              settings.head_param_target);
    head.init_params(rng);

    // Draw the depth samples once per ray and cache the frozen extractor's
    // features; iterations then touch only the tiny head, so the per-node
    // cost is dominated by a single feature pass.
    const double tr = field.truncation();
    const auto per_ray =
        static_cast<size_t>(settings.visible_samples + settings.occluded_samples);
    const size_t fw = field.feature_width();
    const size_t n_samples = hit_rays.size() * per_ray;
    std::vector<double> features(n_samples * fw);
    std::vector<double> targets(n_samples);
    std::vector<double> lambdas(n_samples);
    size_t n_vis_total = 0, n_occ_total = 0;
    for (size_t r = 0; r < hit_rays.size(); ++r) {
        const size_t ray = hit_rays[r];
        const double depth = obs.depths[ray];
        const Vec3 dir = obs.directions[ray];
        const double t_lo = std::max(0.0, depth - tr);
        for (size_t s = 0; s < per_ray; ++s) {
            const bool visible = s < static_cast<size_t>(settings.visible_samples);
            const double t = visible ? rng.uniform(t_lo, depth)
                                     : rng.uniform(depth, obs.max_depth);
            const size_t idx = r * per_ray + s;
            field.features(obs.origin + dir * t, {features.data() + idx * fw, fw});
            targets[idx] = visible ? visible_target(depth, t) : occluded_target(depth, t, tr);
            lambdas[idx] = visible ? settings.lambda_vis : settings.lambda_occ;
            (visible ? n_vis_total : n_occ_total) += 1;
        }
    }
    const double vis_frac = static_cast<double>(settings.visible_samples) /
                            static_cast<double>(per_ray);

    AdamW opt(head.param_count(), settings.adam);
    std::vector<double> grad(head.param_count());
    MlpWorkspace ws;

    for (int iter = 0; iter < settings.max_iters; ++iter) {
        // Subsample rays to the step budget (with replacement when the image
        // has more hit rays than the budget).
        const size_t n_rays = std::min(settings.rays_per_step, hit_rays.size());
        const bool all = hit_rays.size() <= settings.rays_per_step;
        const double n_vis_step = static_cast<double>(n_rays * per_ray) * vis_frac;
        const double n_occ_step = static_cast<double>(n_rays * per_ray) - n_vis_step;

        std::fill(grad.begin(), grad.end(), 0.0);
        double loss = 0.0;
        for (size_t r = 0; r < n_rays; ++r) {
            const size_t ray_idx = all ? r : rng.uniform_int(hit_rays.size());
            for (size_t s = 0; s < per_ray; ++s) {
                const size_t idx = ray_idx * per_ray + s;
                const bool visible = s < static_cast<size_t>(settings.visible_samples);
                const std::span<const double> feat(features.data() + idx * fw, fw);
                const double res = head.forward_cached(feat, ws) - targets[idx];
                const double inv_n = 1.0 / (visible ? n_vis_step : n_occ_step);
                loss += lambdas[idx] * res * res * inv_n;
                head.backward(ws, 2.0 * lambdas[idx] * res * inv_n, grad, {});
            }
        }
        if (!std::isfinite(loss))
            throw TrainingError("local observation training diverged at iteration " +
                                std::to_string(iter));
        opt.step(head.params(), grad);
    }

    return LocalSdf(field, std::move(head), box);
}

SurfacePointSet local_surface_points(const LocalSdf& local) {
    const GridSpec& grid = local.field().grid();
    const auto eval = [&local](std::span<const Vec3> pts, std::span<double> out) {
        for (size_t i = 0; i < pts.size(); ++i) out[i] = local.eval(pts[i]);
    };
    return extract_surface_points(eval, grid, local.box().range(),
                                  local.field().config().kappa * grid.cell_size);
}

} // namespace sdfplan
