#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "datalens/model/model_state.hpp"

namespace datalens::model {

struct TrainConfig {
    int epochs = 30;
    int batch_size = 64;
    double learning_rate = 1e-3;
    std::string optimizer = "adam"; // "adam" or "sgd"
    double momentum = 0.9;          // sgd
    double beta1 = 0.9;             // adam
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct EpochMetrics {
    int epoch = 0; // 1-based
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
};

struct TrainResult {
    ModelState model;
    std::vector<EpochMetrics> history;
};

// Minibatch training, fully pinned by cfg.seed: the init draws and every
// epoch's shuffle derive from it, so the same inputs give bit-identical
// parameters. Post-epoch metrics are computed on the full splits with the
// same code paths the standalone evaluator uses. A non-finite minibatch loss
// aborts with the epoch and batch indices in the message.
TrainResult train_model(const ArchitectureSpec& arch,
                        std::span<const TrainingExample> train_set,
                        std::span<const TrainingExample> val_set, const TrainConfig& cfg);

} // namespace datalens::model
