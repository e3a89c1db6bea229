#include "datalens/data/generate.hpp"

#include <cmath>

#include "datalens/common/error.hpp"
#include "datalens/common/rng.hpp"

namespace datalens::data {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr int kSpikeMargin = 4; // keep the anomaly away from the edges

// class labels for one split: balanced to within one, order shuffled
std::vector<int> balanced_labels(std::size_t n, int num_classes, Rng& rng) {
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i)
        labels[i] = static_cast<int>(i % static_cast<std::size_t>(num_classes));
    shuffle(labels, rng);
    return labels;
}

} // namespace

TimeSeriesDataset generate_anomaly_dataset(std::size_t n_train, std::size_t n_val,
                                           std::size_t n_test, int length, int channels,
                                           std::uint64_t seed) {
    require(n_train >= 1 && n_val >= 1 && n_test >= 1, Error::Kind::config,
            "generate: every split needs at least one sample");
    require(channels >= 1, Error::Kind::config, "generate: channels must be >= 1");
    require(length >= 2 * kSpikeMargin, Error::Kind::config,
            "generate: length must be >= " + std::to_string(2 * kSpikeMargin) +
                " to leave room for the spike placement margin");

    Rng rng(seed);

    TimeSeriesDataset ds;
    ds.channels = channels;
    ds.length = length;
    ds.num_classes = 2;
    const std::size_t n = n_train + n_val + n_test;
    ds.values.reserve(n * ds.sample_stride());
    ds.true_labels.reserve(n);

    for (auto [count, tag] : {std::pair{n_train, Split::train},
                              std::pair{n_val, Split::validation},
                              std::pair{n_test, Split::test}}) {
        const std::vector<int> labels = balanced_labels(count, 2, rng);
        for (int label : labels) {
            const std::size_t base = ds.values.size();
            for (int c = 0; c < channels; ++c) {
                const int n_sines = static_cast<int>(uniform_int(rng, 1, 2));
                double amp_sum = 0.0;
                double amp[2], freq[2], phase[2];
                for (int s = 0; s < n_sines; ++s) {
                    amp[s] = uniform(rng, 0.5, 1.5);
                    freq[s] = uniform(rng, 1.0, 4.0); // cycles over the window
                    phase[s] = uniform(rng, 0.0, kTwoPi);
                    amp_sum += amp[s];
                }
                const double noise_sigma = 0.05 * amp_sum;
                for (int t = 0; t < length; ++t) {
                    double v = 0.0;
                    for (int s = 0; s < n_sines; ++s)
                        v += amp[s] * std::sin(kTwoPi * freq[s] * t / length + phase[s]);
                    v += noise_sigma * normal(rng);
                    ds.values.push_back(v);
                }
            }

            if (label == 1) {
                const int c = static_cast<int>(uniform_int(rng, 0, channels - 1));
                // inclusive range keeps the spike at least kSpikeMargin - 1
                // points off either edge; non-empty exactly when
                // length >= 2 * kSpikeMargin
                const int pos = static_cast<int>(
                    uniform_int(rng, kSpikeMargin, length - kSpikeMargin));
                const double magnitude = 12.0;
                const bool up = u01(rng) < 0.5;

                double* ch = ds.values.data() + base +
                             static_cast<std::size_t>(c) * length;
                double mean = 0.0;
                for (int t = 0; t < length; ++t) mean += ch[t];
                mean /= length;
                double var = 0.0;
                for (int t = 0; t < length; ++t) var += (ch[t] - mean) * (ch[t] - mean);
                const double sigma = std::sqrt(var / length);
                ch[pos] = mean + (up ? magnitude : -magnitude) * sigma;
            }

            ds.true_labels.push_back(label);
            ds.observed_labels.push_back(label);
            ds.flip_mask.push_back(0);
            ds.split.push_back(tag);
        }
    }

    ds.validate();
    return ds;
}

TimeSeriesDataset generate_multiclass_dataset(std::size_t n_train, std::size_t n_val,
                                              std::size_t n_test, int length, int channels,
                                              int num_classes, std::uint64_t seed) {
    require(n_train >= 1 && n_val >= 1 && n_test >= 1, Error::Kind::config,
            "generate: every split needs at least one sample");
    require(channels >= 1, Error::Kind::config, "generate: channels must be >= 1");
    require(num_classes >= 2, Error::Kind::config, "generate: need at least two classes");
    require(num_classes < length / 2, Error::Kind::config,
            "generate: num_classes must be < length/2 so the fastest class stays below "
            "the sampling limit");
    require(n_train >= static_cast<std::size_t>(num_classes), Error::Kind::config,
            "generate: the train split needs at least one sample per class");

    Rng rng(seed);

    TimeSeriesDataset ds;
    ds.channels = channels;
    ds.length = length;
    ds.num_classes = num_classes;
    const std::size_t n = n_train + n_val + n_test;
    ds.values.reserve(n * ds.sample_stride());
    ds.true_labels.reserve(n);

    for (auto [count, tag] : {std::pair{n_train, Split::train},
                              std::pair{n_val, Split::validation},
                              std::pair{n_test, Split::test}}) {
        const std::vector<int> labels = balanced_labels(count, num_classes, rng);
        for (int label : labels) {
            for (int c = 0; c < channels; ++c) {
                const double amp = uniform(rng, 0.8, 1.2);
                const double freq = label + 1 + uniform(rng, -0.15, 0.15);
                const double phase = uniform(rng, 0.0, kTwoPi);
                const double noise_sigma = 0.05 * amp;
                for (int t = 0; t < length; ++t) {
                    double v = amp * std::sin(kTwoPi * freq * t / length + phase);
                    v += noise_sigma * normal(rng);
                    ds.values.push_back(v);
                }
            }
            ds.true_labels.push_back(label);
            ds.observed_labels.push_back(label);
            ds.flip_mask.push_back(0);
            ds.split.push_back(tag);
        }
    }

    ds.validate();
    return ds;
}

} // namespace datalens::data
