#include "datalens/data/dataset.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "datalens/common/error.hpp"
#include "datalens/common/text.hpp"

namespace datalens::data {

const char* split_name(Split s) {
    switch (s) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
    }
    fail(Error::Kind::internal, "unknown split tag");
}

Split split_from_name(std::string_view name) {
    if (name == "train") return Split::train;
    if (name == "validation") return Split::validation;
    if (name == "test") return Split::test;
    fail(Error::Kind::parse, "unknown split name '" + std::string(name) + "'");
}

std::size_t TimeSeriesDataset::count(Split s) const {
    return static_cast<std::size_t>(std::count(split.begin(), split.end(), s));
}

std::vector<std::size_t> TimeSeriesDataset::split_indices(Split s) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < split.size(); ++i)
        if (split[i] == s) out.push_back(i);
    return out;
}

void TimeSeriesDataset::validate() const {
    const std::size_t n = true_labels.size();
    require(channels >= 1 && length >= 1, Error::Kind::config,
            "dataset: channel/length must be positive");
    require(num_classes >= 2, Error::Kind::config, "dataset: need at least 2 classes");
    require(observed_labels.size() == n && flip_mask.size() == n && split.size() == n,
            Error::Kind::config, "dataset: per-sample arrays disagree on length");
    require(values.size() == n * sample_stride(), Error::Kind::config,
            "dataset: value buffer does not match n * channels * length");

    // split order: train block, then validation, then test
    int phase = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const int p = split[i] == Split::train ? 0 : split[i] == Split::validation ? 1 : 2;
        require(p >= phase, Error::Kind::config,
                "dataset: rows must be ordered train, validation, test (row " +
                    std::to_string(i) + " breaks the order)");
        phase = p;
    }

    for (std::size_t i = 0; i < n; ++i) {
        require(true_labels[i] >= 0 && true_labels[i] < num_classes &&
                    observed_labels[i] >= 0 && observed_labels[i] < num_classes,
                Error::Kind::config,
                "dataset: label out of range at sample " + std::to_string(i));
        const bool differs = observed_labels[i] != true_labels[i];
        require(static_cast<bool>(flip_mask[i]) == differs, Error::Kind::config,
                "dataset: flip_mask disagrees with labels at sample " + std::to_string(i));
        require(!differs || split[i] == Split::train, Error::Kind::config,
                "dataset: flipped label outside the train split at sample " +
                    std::to_string(i));
    }
}

std::uint64_t TimeSeriesDataset::fingerprint() const {
    std::uint64_t h = fnv1a64(std::string_view("dataset"));
    auto mix_int = [&h](std::int64_t v) {
        h = fnv1a64(&v, sizeof(v), h);
    };
    mix_int(channels);
    mix_int(length);
    mix_int(num_classes);
    mix_int(static_cast<std::int64_t>(size()));
    if (!values.empty())
        h = fnv1a64(values.data(), values.size() * sizeof(double), h);
    for (std::size_t i = 0; i < size(); ++i) {
        mix_int(true_labels[i]);
        mix_int(observed_labels[i]);
        mix_int(flip_mask[i]);
        mix_int(static_cast<int>(split[i]));
    }
    return h;
}

std::vector<model::TrainingExample> make_examples(const TimeSeriesDataset& ds, Split s) {
    return make_examples(ds, ds.split_indices(s));
}

std::vector<model::TrainingExample> make_examples(const TimeSeriesDataset& ds,
                                                  std::span<const std::size_t> indices) {
    std::vector<model::TrainingExample> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) {
        require(i < ds.size(), Error::Kind::config,
                "make_examples: sample index " + std::to_string(i) + " out of range");
        out.push_back({ds.sample(i), ds.observed_labels[i]});
    }
    return out;
}

TimeSeriesDataset restore_labels(const TimeSeriesDataset& ds,
                                 std::span<const std::size_t> train_indices) {
    TimeSeriesDataset out = ds;
    for (std::size_t i : train_indices) {
        require(i < ds.size() && ds.split[i] == Split::train, Error::Kind::config,
                "restore_labels: index " + std::to_string(i) + " is not a train sample");
        out.observed_labels[i] = out.true_labels[i];
        out.flip_mask[i] = 0;
    }
    return out;
}

TimeSeriesDataset remove_train_samples(const TimeSeriesDataset& ds,
                                       std::span<const std::size_t> train_indices) {
    std::vector<std::uint8_t> drop(ds.size(), 0);
    for (std::size_t i : train_indices) {
        require(i < ds.size() && ds.split[i] == Split::train, Error::Kind::config,
                "remove_train_samples: index " + std::to_string(i) +
                    " is not a train sample");
        drop[i] = 1;
    }

    TimeSeriesDataset out;
    out.channels = ds.channels;
    out.length = ds.length;
    out.num_classes = ds.num_classes;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (drop[i]) continue;
        const auto s = ds.sample(i);
        out.values.insert(out.values.end(), s.begin(), s.end());
        out.true_labels.push_back(ds.true_labels[i]);
        out.observed_labels.push_back(ds.observed_labels[i]);
        out.flip_mask.push_back(ds.flip_mask[i]);
        out.split.push_back(ds.split[i]);
    }

    std::vector<std::size_t> per_class(static_cast<std::size_t>(ds.num_classes), 0);
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out.split[i] == Split::train)
            ++per_class[static_cast<std::size_t>(out.observed_labels[i])];
    for (int c = 0; c < ds.num_classes; ++c)
        require(per_class[static_cast<std::size_t>(c)] > 0, Error::Kind::config,
                "remove_train_samples: deletion leaves class " + std::to_string(c) +
                    " empty in the train split");
    return out;
}

} // namespace datalens::data
