#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "datalens/data/flip.hpp"
#include "datalens/harness/detection.hpp"
#include "datalens/harness/experiments.hpp"
#include "datalens/harness/ranking.hpp"

namespace datalens::harness {

// A ranking column: a score family read in one direction. Column names are
// the row labels of the detection tables (loss, random, low/high/absolute,
// classwise_*, representer_*).
struct ColumnSpec {
    std::string name;
    std::string method; // loss | random | influence | classwise_influence | representer
    Direction direction = Direction::high_first;
};

// direction variants a score family expands to
std::vector<ColumnSpec> columns_for_method(const std::string& method);
ColumnSpec column_by_name(const std::string& column);

struct GridConfig {
    // dataset: synthetic anomaly task or an on-disk bundle
    std::string dataset_kind = "anomaly"; // anomaly | bundle
    std::size_t n_train = 4500, n_val = 500, n_test = 1000;
    int length = 50, channels = 3;
    std::uint64_t dataset_seed = 1;
    std::string bundle_path;

    bool do_flip = false;
    data::FlipSpec flip;

    model::TrainConfig train; // seed field is overridden per grid seed
    scoring::InfluenceConfig influence;
    scoring::RepresenterConfig representer;

    std::vector<std::string> methods; // score families to compute
    std::vector<double> ratios;       // detection table ratios
    std::vector<double> curve_ratios; // dense curve grid
    std::vector<std::uint64_t> seeds; // one full train+score pass per seed
    int repeats = 10;                 // correction/deletion retrain count

    struct Combination {
        std::string name;
        std::vector<std::pair<std::string, double>> constituents; // column, weight
    };
    std::vector<Combination> combinations;

    bool has_diff = false;
    double diff_ratio = 0.25;
    std::size_t diff_lo = 0, diff_hi = 0; // 0,0 = pick a default window

    bool has_correction = false;
    std::string correction_column = "loss";
    double correction_ratio = 0.1;

    bool has_deletion = false;
    std::string deletion_column = "loss";
    double deletion_ratio = 0.1;

    bool timing = false;
    int threads = 1;
};

// Strict parse: unknown keys anywhere are config errors, so typos surface
// before any computation runs.
GridConfig parse_grid_config(const nlohmann::json& j);
nlohmann::json grid_config_to_json(const GridConfig& cfg);

// Apply one config subobject onto defaults, rejecting unknown keys. `where`
// names the object in error messages (e.g. "config.train").
void apply_train_json(const nlohmann::json& j, model::TrainConfig& cfg, const std::string& where);
void apply_influence_json(const nlohmann::json& j, scoring::InfluenceConfig& cfg,
                          const std::string& where);
void apply_representer_json(const nlohmann::json& j, scoring::RepresenterConfig& cfg,
                            const std::string& where);

struct RatePoint {
    std::string column;
    std::uint64_t seed = 0;
    double ratio = 0.0;
    double rate = 0.0;
};

struct SeedArtifacts {
    std::uint64_t seed = 0;
    model::ModelState model;
    double val_accuracy = 0.0;
    double test_accuracy = 0.0;
    std::vector<std::pair<std::string, scoring::ScoreVector>> scores;   // per method
    std::vector<std::pair<std::string, scoring::ScoreVector>> combined; // per preset
};

struct ExperimentReport {
    nlohmann::json resolved_config;
    data::TimeSeriesDataset dataset; // post-flip
    std::vector<SeedArtifacts> per_seed;

    std::vector<RatePoint> detection;
    std::vector<RatePoint> curves;
    std::vector<RatePoint> combinations;

    bool has_diff = false;
    double diff_ratio = 0.0;
    std::array<std::size_t, 2> diff_window{0, 0};
    DetectionDiff diff;

    bool has_timing = false;
    std::vector<TimingEntry> timings;

    bool has_correction = false;
    std::string correction_column;
    double correction_ratio = 0.0;
    ExperimentOutcome correction;

    bool has_deletion = false;
    std::string deletion_column;
    double deletion_ratio = 0.0;
    ExperimentOutcome deletion;

    std::vector<std::string> warnings;
};

// Runs the full suite described by cfg: dataset, flips, one train+score pass
// per seed, detection tables and curves, combinations, and the optional
// diff/correction/deletion/timing stages. Progress lines go to `log`.
ExperimentReport run_grid(const GridConfig& cfg, std::ostream* log = nullptr);

} // namespace datalens::harness
