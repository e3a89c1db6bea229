#pragma once

#include <filesystem>

#include "datalens/harness/grid.hpp"
#include "datalens/io/manifest.hpp"

namespace datalens::io {

// Writes every table, plot, and artifact of a grid run under out_dir and
// registers each file in the manifest. Produces (as applicable):
//   run_config.json                         resolved configuration
//   accuracy.csv                            per-seed val/test accuracy
//   detection.csv / detection_summary.csv   per-seed and mean-over-seed rates
//   combinations.csv / combination_summary.csv
//   curves.csv, plots/curves.svg            dense inspection curves
//   plots/score_distribution_<method>.svg   first-seed score histograms
//   diff.csv                                per-flip hit matrix
//   retrain.csv / retrain_summary.csv       correction/deletion accuracies
//   timing.csv (volatile), timing_settings.json
//   warnings.txt
//   scores/seed<S>/<name>.csv (+ sidecars), models/seed<S>.json
//   dataset/                                reloadable bundle
// Everything except timing.csv is byte-deterministic for a fixed config.
void write_report(const harness::ExperimentReport& rep, const std::filesystem::path& out_dir,
                  RunManifest& manifest);

// Writes just the derived views (summary tables and the curve plot) for a
// report whose long-form tables are populated; used to re-render a finished
// run without recomputing anything.
void write_rendered_tables(const harness::ExperimentReport& rep,
                           const std::filesystem::path& out_dir, RunManifest& manifest);

} // namespace datalens::io
