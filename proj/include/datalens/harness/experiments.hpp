#pragma once

#include <span>
#include <string>
#include <vector>

#include "datalens/data/dataset.hpp"
#include "datalens/model/train.hpp"
#include "datalens/scoring/influence.hpp"
#include "datalens/scoring/representer.hpp"

namespace datalens::harness {

struct RepeatStats {
    std::vector<double> accuracies; // test accuracy, one per repeat
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation (0 for a single repeat)
};

// Trains `repeats` models on the dataset with seeds derive_seed(cfg.seed, r)
// and evaluates each on the test split.
RepeatStats repeat_training(const data::TimeSeriesDataset& ds,
                            const model::ArchitectureSpec& arch,
                            const model::TrainConfig& cfg, int repeats);

struct ExperimentOutcome {
    RepeatStats treated;  // corrected or pruned dataset
    RepeatStats baseline; // untouched dataset, same derived seeds
    std::size_t inspected = 0;
    std::size_t affected = 0; // labels restored / samples removed
};

// Restores true labels on inspected-and-flipped samples, retrains, and
// reports accuracy statistics next to the uncorrected baseline. ratio may be
// 0 (no-op; treated == baseline). `ranking` orders the train split, most
// suspicious first. Pass `baseline` to reuse stats from a previous run.
ExperimentOutcome correction_experiment(const data::TimeSeriesDataset& ds,
                                        std::span<const std::size_t> ranking, double ratio,
                                        const model::ArchitectureSpec& arch,
                                        const model::TrainConfig& cfg, int repeats,
                                        const RepeatStats* baseline = nullptr);

// Removes the inspected samples entirely instead of correcting them.
ExperimentOutcome deletion_experiment(const data::TimeSeriesDataset& ds,
                                      std::span<const std::size_t> ranking, double ratio,
                                      const model::ArchitectureSpec& arch,
                                      const model::TrainConfig& cfg, int repeats,
                                      const RepeatStats* baseline = nullptr);

// Wall time of each scoring method on the given model/dataset. Training is
// excluded; the loss entry reports 0 by convention because those values fall
// out of evaluation. Influence/representer timings include their solves.
struct TimingEntry {
    std::string method;
    double seconds = 0.0;
    nlohmann::json settings;
};

struct TimingRequest {
    std::vector<std::string> methods; // of: loss, random, influence,
                                      // classwise_influence, representer
    scoring::InfluenceConfig influence;
    scoring::RepresenterConfig representer;
    std::uint64_t random_seed = 0;
};

std::vector<TimingEntry> timing_report(const model::ModelState& m,
                                       const data::TimeSeriesDataset& ds,
                                       const TimingRequest& req);

} // namespace datalens::harness
