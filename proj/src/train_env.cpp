#include "sdfplan/train_env.hpp"

#include <numeric>

namespace sdfplan {

EnvFieldTrainer::EnvFieldTrainer(EnvField& field, const TsdfSampleSet& samples,
                                 const TrainSettings& settings)
    : field_(field), samples_(samples), settings_(settings),
      opt_grid_(field.hash_grid().param_count(), settings.adam),
      opt_head_(field.head().param_count(), settings.adam), rng_(settings.seed ^ 0x7E57ull),
      order_(samples.size()) {
    if (samples.size() == 0) throw InvalidInput("empty training set");
    if (samples.truncation != field.truncation())
        throw InvalidInput("sample truncation does not match the field");
    if (settings.batch_size == 0) throw InvalidInput("batch size must be positive");
    std::iota(order_.begin(), order_.end(), size_t{0});
    grad_grid_.resize(field.hash_grid().param_count());
    grad_head_.resize(field.head().param_count());
}

double EnvFieldTrainer::loss_and_gradients(std::span<const size_t> batch,
                                           std::span<double> grad_grid,
                                           std::span<double> grad_head) {
    std::fill(grad_grid.begin(), grad_grid.end(), 0.0);
    std::fill(grad_head.begin(), grad_head.end(), 0.0);

    thread_local std::vector<double> feat, grad_feat;
    thread_local std::vector<HashGridEncoder::Touch> tape;
    thread_local MlpWorkspace ws;
    const size_t fw = field_.feature_width();
    const size_t hash_w = field_.hash_grid().output_width();
    feat.resize(fw);
    grad_feat.resize(fw);

    // Loss uses the raw head output against clamped targets; clamping the
    // prediction here would zero gradients wherever the net overshoots the
    // truncation band.
    double loss = 0.0;
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    for (const size_t idx : batch) {
        field_.features_with_tape(samples_.points[idx], feat, tape);
        const double pred = field_.head().forward_cached(feat, ws);
        const double r = pred - samples_.values[idx];
        loss += r * r * inv_n;

        std::fill(grad_feat.begin(), grad_feat.end(), 0.0);
        field_.head().backward(ws, 2.0 * r * inv_n, grad_head, grad_feat);
        field_.hash_grid().accumulate_gradient(
            tape, std::span<const double>(grad_feat.data(), hash_w), grad_grid);
    }
    return loss;
}

double EnvFieldTrainer::run_epoch() {
    // Fisher-Yates shuffle under the trainer rng.
    for (size_t i = order_.size(); i > 1; --i)
        std::swap(order_[i - 1], order_[rng_.uniform_int(i)]);

    const std::vector<double> snapshot_grid = field_.hash_grid().params();
    const std::vector<double> snapshot_head = field_.head().params();

    double loss_sum = 0.0;
    size_t seen = 0;
    for (size_t start = 0; start < order_.size(); start += settings_.batch_size) {
        const size_t n = std::min(settings_.batch_size, order_.size() - start);
        const std::span<const size_t> batch(order_.data() + start, n);
        const double loss = loss_and_gradients(batch, grad_grid_, grad_head_);
        if (!std::isfinite(loss)) {
            field_.hash_grid().params() = snapshot_grid;
            field_.head().params() = snapshot_head;
            throw TrainingError("training diverged (non-finite loss); parameters restored to "
                                "the last finite epoch");
        }
        opt_grid_.step(field_.hash_grid().params(), grad_grid_);
        opt_head_.step(field_.head().params(), grad_head_);
        loss_sum += loss * static_cast<double>(n);
        seen += n;
    }
    return loss_sum / static_cast<double>(seen);
}

TrainReport EnvFieldTrainer::run() {
    TrainReport report;
    report.epoch_loss.reserve(static_cast<size_t>(settings_.epochs));
    for (int e = 0; e < settings_.epochs; ++e) report.epoch_loss.push_back(run_epoch());
    report.final_loss = report.epoch_loss.empty() ? 0.0 : report.epoch_loss.back();
    return report;
}

std::pair<EnvField, TrainReport> train_env_field(const TsdfSampleSet& samples,
                                                 const EnvFieldConfig& config,
                                                 const TrainSettings& settings) {
    EnvField field(config, settings.seed);
    EnvFieldTrainer trainer(field, samples, settings);
    TrainReport report = trainer.run();
    return {std::move(field), std::move(report)};
}

} // namespace sdfplan
