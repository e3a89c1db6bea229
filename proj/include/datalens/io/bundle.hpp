#pragma once

#include <filesystem>

#include "datalens/data/dataset.hpp"

namespace datalens::io {

// On-disk dataset layout under one directory:
//   data.csv      observed labels + series values, one row per sample
//   truth.csv     index, true label, observed label, flip flag, split
//   manifest.json shape, counts, format version, content fingerprint
// read_bundle reconstructs the dataset exactly; the fingerprint recorded at
// write time must match after reload.
void write_bundle(const data::TimeSeriesDataset& ds, const std::filesystem::path& dir);
data::TimeSeriesDataset read_bundle(const std::filesystem::path& dir);

} // namespace datalens::io
