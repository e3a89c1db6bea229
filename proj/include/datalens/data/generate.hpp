#pragma once

#include <cstdint>

#include "datalens/data/dataset.hpp"

namespace datalens::data {

// Two-class point-anomaly task. Every sample is a per-channel mixture of one
// or two random sinusoids plus light Gaussian noise; positive-class samples
// additionally get one point in one random channel overwritten with a spike
// at least 3 standard deviations away from that channel's mean. Classes are
// balanced to within one sample per split. Bit-identical for a fixed seed.
//
// length must be >= 8 so the spike never sits against an edge.
TimeSeriesDataset generate_anomaly_dataset(std::size_t n_train, std::size_t n_val,
                                           std::size_t n_test, int length, int channels,
                                           std::uint64_t seed);

// k-class task where class c's samples oscillate at a characteristic
// frequency of c+1 cycles per window (jittered slightly), plus light noise.
// Classes are balanced to within one per split. num_classes must stay below
// length/2 so the fastest class remains resolvable.
TimeSeriesDataset generate_multiclass_dataset(std::size_t n_train, std::size_t n_val,
                                              std::size_t n_test, int length, int channels,
                                              int num_classes, std::uint64_t seed);

} // namespace datalens::data
