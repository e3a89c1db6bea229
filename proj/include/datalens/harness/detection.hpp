#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "datalens/data/dataset.hpp"

namespace datalens::harness {

// flip indicators for the train split only, in train order
std::vector<std::uint8_t> train_flip_mask(const data::TimeSeriesDataset& ds);

// ceil(ratio * n) with a guard against ratio*n landing epsilon above an
// integer; ratio in (0, 1]
std::size_t inspected_count(double ratio, std::size_t n);

// |top-k of ranking  ∩  flips| / |flips|; errors when the mask has no flips
double detection_rate(std::span<const std::size_t> ranking,
                      std::span<const std::uint8_t> flip_mask, double ratio);

struct InspectionResult {
    double ratio = 0.0;
    std::size_t inspected = 0; // prefix length
    std::size_t detected = 0;
    double rate = 0.0;
};

// Evaluates nested prefixes of one ranking at each ratio; the resulting
// rates are monotone non-decreasing in ratio by construction.
std::vector<InspectionResult> inspection_curve(std::span<const std::size_t> ranking,
                                               std::span<const std::uint8_t> flip_mask,
                                               std::span<const double> ratios);

// Which methods catch which flipped samples inside an index window,
// everything at one inspection ratio. One row per flipped sample in
// [window_lo, window_hi), one column per ranking.
struct DetectionDiff {
    std::vector<std::size_t> flip_indices;
    std::vector<std::string> methods;
    std::vector<std::uint8_t> detected; // row-major flips x methods
};

struct NamedRanking {
    std::string name;
    std::vector<std::size_t> order;
};

DetectionDiff detection_diff(std::span<const NamedRanking> rankings,
                             std::span<const std::uint8_t> flip_mask, double ratio,
                             std::size_t window_lo, std::size_t window_hi);

} // namespace datalens::harness
