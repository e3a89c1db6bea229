#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "datalens/model/model_state.hpp"

namespace datalens::data {

enum class Split { train, validation, test };

const char* split_name(Split s);
Split split_from_name(std::string_view name);

// Immutable-by-convention container for one labeled time-series collection.
// Samples are stored sample-major, channel-major within each sample. The
// train split always occupies the leading rows, then validation, then test.
struct TimeSeriesDataset {
    int channels = 0;
    int length = 0;
    int num_classes = 0;
    std::vector<double> values; // n * channels * length
    std::vector<int> true_labels;
    std::vector<int> observed_labels;
    std::vector<std::uint8_t> flip_mask;
    std::vector<Split> split;

    std::size_t size() const { return true_labels.size(); }
    std::size_t sample_stride() const {
        return static_cast<std::size_t>(channels) * static_cast<std::size_t>(length);
    }
    std::span<const double> sample(std::size_t i) const {
        return {values.data() + i * sample_stride(), sample_stride()};
    }

    std::size_t count(Split s) const;
    std::vector<std::size_t> split_indices(Split s) const;

    // Enforces: flip_mask[i] == (observed != true), flips confined to the
    // train split, labels in [0, num_classes), consistent array lengths,
    // train-first row order. Throws Error::Kind::config on violation.
    void validate() const;

    // content hash over shape, values, labels, and split tags
    std::uint64_t fingerprint() const;
};

// samples of one split as network inputs with observed labels, ascending index
std::vector<model::TrainingExample> make_examples(const TimeSeriesDataset& ds, Split s);
std::vector<model::TrainingExample> make_examples(const TimeSeriesDataset& ds,
                                                  std::span<const std::size_t> indices);

// copy with true labels restored on the given train samples (correction)
[[nodiscard]] TimeSeriesDataset restore_labels(const TimeSeriesDataset& ds,
                                               std::span<const std::size_t> train_indices);

// copy with the given train samples removed entirely (deletion); errors when
// a class would disappear from the train split
[[nodiscard]] TimeSeriesDataset remove_train_samples(
    const TimeSeriesDataset& ds, std::span<const std::size_t> train_indices);

} // namespace datalens::data
