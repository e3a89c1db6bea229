#include "datalens/harness/experiments.hpp"

#include <chrono>
#include <cmath>

#include "datalens/common/error.hpp"
#include "datalens/common/rng.hpp"
#include "datalens/harness/detection.hpp"
#include "datalens/model/eval.hpp"
#include "datalens/scoring/loss_scores.hpp"
#include "datalens/scoring/random_scores.hpp"

namespace datalens::harness {

namespace {

void finalize(RepeatStats& s) {
    double sum = 0.0;
    for (double a : s.accuracies) sum += a;
    s.mean = sum / static_cast<double>(s.accuracies.size());
    double var = 0.0;
    for (double a : s.accuracies) var += (a - s.mean) * (a - s.mean);
    s.stddev = s.accuracies.size() > 1
                   ? std::sqrt(var / static_cast<double>(s.accuracies.size() - 1))
                   : 0.0;
}

// inspected prefix of the ranking, as global sample indices
std::vector<std::size_t> inspected_global(const data::TimeSeriesDataset& ds,
                                          std::span<const std::size_t> ranking,
                                          double ratio) {
    const auto train_idx = ds.split_indices(data::Split::train);
    require(ranking.size() == train_idx.size(), Error::Kind::config,
            "experiment: ranking length does not match the train split");
    if (ratio == 0.0) return {};
    const std::size_t k = inspected_count(ratio, train_idx.size());
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t pos = 0; pos < k; ++pos) out.push_back(train_idx[ranking[pos]]);
    return out;
}

ExperimentOutcome run_retrain(const data::TimeSeriesDataset& ds,
                              const data::TimeSeriesDataset& treated_ds,
                              std::size_t inspected, std::size_t affected,
                              const model::ArchitectureSpec& arch,
                              const model::TrainConfig& cfg, int repeats,
                              const RepeatStats* baseline) {
    ExperimentOutcome out;
    out.inspected = inspected;
    out.affected = affected;
    out.treated = repeat_training(treated_ds, arch, cfg, repeats);
    out.baseline = baseline ? *baseline : repeat_training(ds, arch, cfg, repeats);
    require(out.baseline.accuracies.size() == static_cast<std::size_t>(repeats),
            Error::Kind::config, "experiment: baseline has a different repeat count");
    return out;
}

} // namespace

RepeatStats repeat_training(const data::TimeSeriesDataset& ds,
                            const model::ArchitectureSpec& arch,
                            const model::TrainConfig& cfg, int repeats) {
    require(repeats >= 1, Error::Kind::config, "experiment: repeats must be >= 1");
    const auto train = data::make_examples(ds, data::Split::train);
    const auto val = data::make_examples(ds, data::Split::validation);
    const auto test = data::make_examples(ds, data::Split::test);
    require(!test.empty(), Error::Kind::config, "experiment: empty test split");

    RepeatStats stats;
    stats.accuracies.reserve(static_cast<std::size_t>(repeats));
    for (int r = 0; r < repeats; ++r) {
        model::TrainConfig run_cfg = cfg;
        run_cfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
        const auto result = model::train_model(arch, train, val, run_cfg);
        stats.accuracies.push_back(model::accuracy(result.model, test, cfg.threads));
    }
    finalize(stats);
    return stats;
}

ExperimentOutcome correction_experiment(const data::TimeSeriesDataset& ds,
                                        std::span<const std::size_t> ranking, double ratio,
                                        const model::ArchitectureSpec& arch,
                                        const model::TrainConfig& cfg, int repeats,
                                        const RepeatStats* baseline) {
    const auto inspected = inspected_global(ds, ranking, ratio);
    std::vector<std::size_t> to_fix;
    for (std::size_t i : inspected)
        if (ds.flip_mask[i]) to_fix.push_back(i);

    const data::TimeSeriesDataset corrected = data::restore_labels(ds, to_fix);
    return run_retrain(ds, corrected, inspected.size(), to_fix.size(), arch, cfg,
                       repeats, baseline);
}

ExperimentOutcome deletion_experiment(const data::TimeSeriesDataset& ds,
                                      std::span<const std::size_t> ranking, double ratio,
                                      const model::ArchitectureSpec& arch,
                                      const model::TrainConfig& cfg, int repeats,
                                      const RepeatStats* baseline) {
    const auto inspected = inspected_global(ds, ranking, ratio);
    const data::TimeSeriesDataset pruned = data::remove_train_samples(ds, inspected);
    return run_retrain(ds, pruned, inspected.size(), inspected.size(), arch, cfg,
                       repeats, baseline);
}

std::vector<TimingEntry> timing_report(const model::ModelState& m,
                                       const data::TimeSeriesDataset& ds,
                                       const TimingRequest& req) {
    require(!req.methods.empty(), Error::Kind::config, "timing: no methods requested");
    using clock = std::chrono::steady_clock;

    std::vector<TimingEntry> out;
    for (const std::string& method : req.methods) {
        TimingEntry e;
        e.method = method;
        const auto t0 = clock::now();
        if (method == "loss") {
            // collected during evaluation; reported as zero extra time
            e.seconds = 0.0;
            e.settings = {{"convention", "collected during evaluation"}};
            out.push_back(e);
            continue;
        } else if (method == "random") {
            const auto sv = scoring::random_scores(ds.count(data::Split::train),
                                                   req.random_seed);
            e.settings = sv.meta;
        } else if (method == "influence") {
            const auto sv = scoring::influence_scores(m, ds, req.influence);
            e.settings = sv.meta;
        } else if (method == "classwise_influence") {
            const auto sv = scoring::classwise_influence_scores(m, ds, req.influence);
            e.settings = sv.meta;
        } else if (method == "representer") {
            const auto sv = scoring::representer_scores(m, ds, req.representer);
            e.settings = sv.meta;
        } else {
            fail(Error::Kind::config, "timing: unknown method '" + method + "'");
        }
        e.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        out.push_back(e);
    }
    return out;
}

} // namespace datalens::harness
