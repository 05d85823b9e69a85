// train_env.hpp — joint optimization of the feature extractor and global head
// on clamped signed-distance targets (mean squared error, minibatch AdamW).

#pragma once

#include "sdfplan/adamw.hpp"
#include "sdfplan/env_field.hpp"
#include "sdfplan/tsdf_sampling.hpp"

namespace sdfplan {

struct TrainSettings {
    int epochs = 150;
    size_t batch_size = 4096;
    AdamWParams adam;
    uint64_t seed = 1;
};

struct TrainReport {
    std::vector<double> epoch_loss; // mean squared error per epoch
    double final_loss = 0.0;
};

class EnvFieldTrainer {
public:
    EnvFieldTrainer(EnvField& field, const TsdfSampleSet& samples, const TrainSettings& settings);

    // One pass over the sample set; returns the mean loss. Throws
    // TrainingError on divergence, restoring the last finite parameters.
    double run_epoch();
    TrainReport run();

    // Loss and dense gradients for an index batch; exposed so gradient checks
    // can probe the exact training path.
    double loss_and_gradients(std::span<const size_t> batch, std::span<double> grad_grid,
                              std::span<double> grad_head);

private:
    EnvField& field_;
    const TsdfSampleSet& samples_;
    TrainSettings settings_;
    AdamW opt_grid_;
    AdamW opt_head_;
    Rng rng_;
    std::vector<size_t> order_;
    std::vector<double> grad_grid_, grad_head_;
};

// Builds a fresh field (seeded by settings.seed) and trains it on `samples`.
std::pair<EnvField, TrainReport> train_env_field(const TsdfSampleSet& samples,
                                                 const EnvFieldConfig& config,
                                                 const TrainSettings& settings);

} // namespace sdfplan
