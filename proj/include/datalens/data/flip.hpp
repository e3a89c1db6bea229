#pragma once

#include <cstdint>
#include <string_view>

#include "datalens/data/dataset.hpp"

namespace datalens::data {

enum class FlipMode {
    binary_complement,   // label -> 1 - label (2-class datasets only)
    uniform_other_class, // uniform draw over the other k-1 classes
};

const char* flip_mode_name(FlipMode m);
FlipMode flip_mode_from_name(std::string_view name);

struct FlipSpec {
    double rate = 0.0; // in [0, 1]
    std::uint64_t seed = 0;
    FlipMode mode = FlipMode::binary_complement;
};

// Returns a copy with exactly round(rate * n_train) train labels flipped,
// chosen uniformly by seed. flip_mask records the ground truth. The input
// must not contain prior flips.
[[nodiscard]] TimeSeriesDataset flip_labels(const TimeSeriesDataset& ds, const FlipSpec& spec);

} // namespace datalens::data
