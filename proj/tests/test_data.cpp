#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include "datalens/common/error.hpp"
#include "datalens/data/dataset.hpp"
#include "datalens/data/delimited.hpp"
#include "datalens/data/flip.hpp"
#include "datalens/data/generate.hpp"

using namespace datalens;

namespace {

// largest per-channel z-score of any point in sample i
double max_z(const data::TimeSeriesDataset& ds, std::size_t i) {
    double best = 0.0;
    const auto s = ds.sample(i);
    for (int c = 0; c < ds.channels; ++c) {
        const double* v = s.data() + static_cast<std::size_t>(c) * ds.length;
        double mean = 0.0;
        for (int t = 0; t < ds.length; ++t) mean += v[t];
        mean /= ds.length;
        double var = 0.0;
        for (int t = 0; t < ds.length; ++t) var += (v[t] - mean) * (v[t] - mean);
        const double sd = std::sqrt(var / ds.length);
        for (int t = 0; t < ds.length; ++t)
            best = std::max(best, std::abs(v[t] - mean) / sd);
    }
    return best;
}

data::TimeSeriesDataset tiny_ds() {
    return data::generate_anomaly_dataset(40, 10, 10, 16, 2, 3);
}

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("generator produces the requested shape, balanced and clean") {
    const auto ds = data::generate_anomaly_dataset(101, 20, 30, 24, 3, 7);
    ds.validate();
    CHECK(ds.size() == 151);
    CHECK(ds.values.size() == 151 * 3 * 24);
    CHECK(ds.count(data::Split::train) == 101);
    CHECK(ds.count(data::Split::validation) == 20);
    CHECK(ds.count(data::Split::test) == 30);
    CHECK(ds.num_classes == 2);

    // no flips out of the generator
    CHECK(ds.observed_labels == ds.true_labels);
    CHECK(std::count(ds.flip_mask.begin(), ds.flip_mask.end(), 1) == 0);

    // balance within one sample per split
    for (auto split : {data::Split::train, data::Split::validation, data::Split::test}) {
        const auto idx = ds.split_indices(split);
        long ones = 0;
        for (auto i : idx) ones += ds.true_labels[i];
        CHECK(std::abs(2 * ones - static_cast<long>(idx.size())) <= 1);
    }
}

TEST_CASE("generator is bit-identical per seed and distinct across seeds") {
    const auto a = tiny_ds();
    const auto b = tiny_ds();
    const auto c = data::generate_anomaly_dataset(40, 10, 10, 16, 2, 4);
    CHECK(a.values == b.values);
    CHECK(a.true_labels == b.true_labels);
    CHECK(a.fingerprint() == b.fingerprint());
    CHECK(a.values != c.values);
}

TEST_CASE("positive-class samples carry a point anomaly") {
    const auto ds = data::generate_anomaly_dataset(200, 2, 2, 32, 2, 11);
    double pos_min = 1e9, pos_mean = 0.0, neg_mean = 0.0;
    std::size_t pos_n = 0, neg_n = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double z = max_z(ds, i);
        if (ds.true_labels[i] == 1) {
            pos_min = std::min(pos_min, z);
            pos_mean += z;
            ++pos_n;
        } else {
            neg_mean += z;
            ++neg_n;
        }
    }
    pos_mean /= pos_n;
    neg_mean /= neg_n;
    // the injected spike sits >= 3 sigma from the channel mean before
    // injection; the spike itself inflates the channel sd a little, so the
    // post-hoc scan uses a slightly looser floor
    CHECK(pos_min >= 2.5);
    CHECK(pos_mean > neg_mean + 0.5);
}

TEST_CASE("generator rejects lengths with no room for a spike") {
    CHECK_THROWS_AS(data::generate_anomaly_dataset(10, 2, 2, 7, 1, 0), Error);
}

TEST_CASE("multiclass generator separates classes by dominant frequency") {
    const auto ds = data::generate_multiclass_dataset(60, 12, 12, 48, 1, 6, 13);
    ds.validate();
    CHECK(ds.num_classes == 6);
    CHECK(ds.size() == 84);

    // balance within one per split
    for (auto split : {data::Split::train, data::Split::validation, data::Split::test}) {
        std::vector<int> counts(6, 0);
        for (auto i : ds.split_indices(split)) ++counts[ds.true_labels[i]];
        const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
        CHECK(*hi - *lo <= 1);
    }

    // the dominant DFT bin recovers the class for nearly every sample
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto s = ds.sample(i);
        double best_power = -1.0;
        int best_bin = 0;
        for (int k = 1; k <= 8; ++k) {
            double re = 0.0, im = 0.0;
            for (int t = 0; t < ds.length; ++t) {
                const double a = 2.0 * 3.14159265358979323846 * k * t / ds.length;
                re += s[t] * std::cos(a);
                im += s[t] * std::sin(a);
            }
            const double p = re * re + im * im;
            if (p > best_power) {
                best_power = p;
                best_bin = k;
            }
        }
        if (best_bin == ds.true_labels[i] + 1) ++hits;
    }
    CHECK(static_cast<double>(hits) / ds.size() >= 0.95);

    // determinism and validation
    const auto again = data::generate_multiclass_dataset(60, 12, 12, 48, 1, 6, 13);
    CHECK(again.values == ds.values);
    CHECK_THROWS_AS(data::generate_multiclass_dataset(60, 12, 12, 48, 1, 30, 13), Error);
    CHECK_THROWS_AS(data::generate_multiclass_dataset(4, 2, 2, 48, 1, 6, 13), Error);
}

TEST_CASE("label flipping hits exactly the requested count, train only") {
    const auto ds = tiny_ds();
    const auto flipped = data::flip_labels(ds, {0.25, 5, data::FlipMode::binary_complement});
    flipped.validate();

    std::size_t n_flipped = 0;
    for (std::size_t i = 0; i < flipped.size(); ++i) {
        const bool changed = flipped.observed_labels[i] != flipped.true_labels[i];
        CHECK(changed == static_cast<bool>(flipped.flip_mask[i]));
        if (changed) {
            ++n_flipped;
            CHECK(flipped.split[i] == data::Split::train);
            CHECK(flipped.observed_labels[i] == 1 - flipped.true_labels[i]);
        }
    }
    CHECK(n_flipped == 10); // round(0.25 * 40)
    CHECK(flipped.true_labels == ds.true_labels);
    CHECK(flipped.values == ds.values);
}

TEST_CASE("flip selection is seeded") {
    const auto ds = tiny_ds();
    const auto a = data::flip_labels(ds, {0.25, 5, data::FlipMode::binary_complement});
    const auto b = data::flip_labels(ds, {0.25, 5, data::FlipMode::binary_complement});
    const auto c = data::flip_labels(ds, {0.25, 6, data::FlipMode::binary_complement});
    CHECK(a.observed_labels == b.observed_labels);
    CHECK(a.observed_labels != c.observed_labels);
}

TEST_CASE("flip edge rates and misuse") {
    const auto ds = tiny_ds();
    const auto none = data::flip_labels(ds, {0.0, 1, data::FlipMode::binary_complement});
    CHECK(none.observed_labels == ds.observed_labels);

    const auto all = data::flip_labels(ds, {1.0, 1, data::FlipMode::binary_complement});
    for (auto i : all.split_indices(data::Split::train))
        CHECK(all.flip_mask[i] == 1);

    CHECK_THROWS_AS(data::flip_labels(ds, {1.5, 1, data::FlipMode::binary_complement}), Error);
    CHECK_THROWS_AS(data::flip_labels(ds, {-0.1, 1, data::FlipMode::binary_complement}), Error);

    // refusing to stack flips keeps flip_mask meaningful
    const auto once = data::flip_labels(ds, {0.1, 1, data::FlipMode::binary_complement});
    CHECK_THROWS_AS(data::flip_labels(once, {0.1, 2, data::FlipMode::binary_complement}), Error);
}

TEST_CASE("uniform_other_class never draws the original label") {
    auto ds = tiny_ds();
    ds.num_classes = 4;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        ds.true_labels[i] = static_cast<int>(i % 4);
        ds.observed_labels[i] = ds.true_labels[i];
    }
    const auto flipped = data::flip_labels(ds, {0.5, 9, data::FlipMode::uniform_other_class});
    for (std::size_t i = 0; i < flipped.size(); ++i)
        if (flipped.flip_mask[i]) {
            CHECK(flipped.observed_labels[i] != flipped.true_labels[i]);
            CHECK(flipped.observed_labels[i] >= 0);
            CHECK(flipped.observed_labels[i] < 4);
        }

    // binary complement is undefined beyond two classes
    CHECK_THROWS_AS(data::flip_labels(ds, {0.1, 1, data::FlipMode::binary_complement}), Error);
}

TEST_CASE("delimited files round-trip bit-exactly") {
    const auto ds = tiny_ds();
    const auto path = temp_file("datalens_roundtrip.csv");
    data::save_delimited(ds, path.string(), true);

    data::DelimitedSchema schema;
    schema.channels = ds.channels;
    schema.length = ds.length;
    schema.has_header = true;
    schema.n_train = 40;
    schema.n_val = 10;
    schema.n_test = 10;
    const auto back = data::load_delimited(path.string(), schema);
    CHECK(back.values == ds.values);
    CHECK(back.observed_labels == ds.observed_labels);
    CHECK(back.channels == ds.channels);
    CHECK(back.length == ds.length);
    CHECK(back.count(data::Split::validation) == 10);

    // n_test = -1 takes the remainder
    schema.n_test = -1;
    CHECK(data::load_delimited(path.string(), schema).count(data::Split::test) == 10);
    std::filesystem::remove(path);
}

TEST_CASE("delimited loader re-indexes raw labels densely") {
    const auto path = temp_file("datalens_sparse_labels.csv");
    std::ofstream(path) << "9,1.0,2.0\n5,3.0,4.0\n9,5.0,6.0\n";
    data::DelimitedSchema schema;
    schema.channels = 1;
    schema.length = 2;
    schema.n_train = 3;
    schema.n_val = 0;
    schema.n_test = 0;
    const auto ds = data::load_delimited(path.string(), schema);
    CHECK(ds.num_classes == 2);
    CHECK(ds.observed_labels == std::vector<int>{1, 0, 1}); // 5 -> 0, 9 -> 1
    std::filesystem::remove(path);
}

TEST_CASE("delimited loader reports malformed rows by line number") {
    const auto path = temp_file("datalens_bad.csv");
    data::DelimitedSchema schema;
    schema.channels = 1;
    schema.length = 2;
    schema.n_train = 2;
    schema.n_val = 0;
    schema.n_test = 0;

    auto expect_parse_error = [&](const char* content, const char* needle) {
        std::ofstream(path) << content;
        try {
            data::load_delimited(path.string(), schema);
            FAIL("expected parse error for: ", content);
        } catch (const Error& e) {
            CHECK(e.kind() == Error::Kind::parse);
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    expect_parse_error("0,1.0,2.0\n1,3.0\n", "2");          // ragged row
    expect_parse_error("0,1.0,2.0\n1,3.0,x\n", "2");        // non-numeric value
    expect_parse_error("0,1.0,2.0,9.0\n1,3.0,4.0\n", "1");  // too many fields

    schema.closed_labels = {0, 1};
    expect_parse_error("0,1.0,2.0\n7,3.0,4.0\n", "2"); // label outside closed set

    std::ofstream(path) << "0,1.0,2.0\n";
    CHECK_THROWS_AS(data::load_delimited(path.string(), schema), Error); // fewer rows than splits
    CHECK_THROWS_AS(data::load_delimited("/nonexistent/x.csv", schema), Error);
    std::filesystem::remove(path);
}

TEST_CASE("restore_labels corrects exactly the chosen train samples") {
    const auto flipped = data::flip_labels(tiny_ds(), {0.25, 5, data::FlipMode::binary_complement});
    std::vector<std::size_t> flipped_idx;
    for (std::size_t i = 0; i < flipped.size(); ++i)
        if (flipped.flip_mask[i]) flipped_idx.push_back(i);
    REQUIRE(flipped_idx.size() == 10);

    // restore half of them
    const std::vector<std::size_t> chosen(flipped_idx.begin(), flipped_idx.begin() + 5);
    const auto fixed = data::restore_labels(flipped, chosen);
    fixed.validate();
    for (auto i : chosen) {
        CHECK(fixed.observed_labels[i] == fixed.true_labels[i]);
        CHECK(fixed.flip_mask[i] == 0);
    }
    std::size_t remaining = 0;
    for (auto m : fixed.flip_mask) remaining += m;
    CHECK(remaining == 5);

    // restoring an already-clean sample is a harmless no-op
    const auto same = data::restore_labels(fixed, chosen);
    CHECK(same.observed_labels == fixed.observed_labels);
}

TEST_CASE("remove_train_samples drops rows and keeps other splits intact") {
    const auto ds = tiny_ds();
    const std::vector<std::size_t> victims{0, 3, 17};
    const auto cut = data::remove_train_samples(ds, victims);
    cut.validate();
    CHECK(cut.count(data::Split::train) == 37);
    CHECK(cut.count(data::Split::validation) == 10);
    CHECK(cut.count(data::Split::test) == 10);
    CHECK(cut.size() == ds.size() - 3);

    // surviving sample content is unchanged (sample 1 was not removed)
    const auto orig = ds.sample(1);
    const auto kept = cut.sample(0);
    CHECK(std::equal(orig.begin(), orig.end(), kept.begin()));

    // removing every sample of one class is an error
    std::vector<std::size_t> all_zeros;
    for (auto i : ds.split_indices(data::Split::train))
        if (ds.observed_labels[i] == 0) all_zeros.push_back(i);
    CHECK_THROWS_AS(data::remove_train_samples(ds, all_zeros), Error);

    // non-train victims are rejected
    CHECK_THROWS_AS(data::remove_train_samples(ds, std::vector<std::size_t>{45}), Error);
}

TEST_CASE("dataset validation catches inconsistencies") {
    auto ds = tiny_ds();
    ds.validate();

    auto broken = ds;
    broken.observed_labels[0] = 1 - broken.observed_labels[0]; // mask says clean
    CHECK_THROWS_AS(broken.validate(), Error);

    broken = ds;
    broken.observed_labels[45] = 1 - broken.observed_labels[45]; // flip in test split
    broken.flip_mask[45] = 1;
    CHECK_THROWS_AS(broken.validate(), Error);

    broken = ds;
    broken.true_labels[2] = 5; // out of range
    CHECK_THROWS_AS(broken.validate(), Error);

    broken = ds;
    broken.true_labels.pop_back(); // length mismatch
    CHECK_THROWS_AS(broken.validate(), Error);

    broken = ds;
    broken.split[0] = data::Split::test; // test row before train rows
    CHECK_THROWS_AS(broken.validate(), Error);
}

TEST_CASE("fingerprint reacts to any content change") {
    const auto ds = tiny_ds();
    const auto base = ds.fingerprint();

    auto v = ds;
    v.values[7] += 1e-9;
    CHECK(v.fingerprint() != base);

    auto l = ds;
    l.observed_labels[0] = 1 - l.observed_labels[0];
    l.flip_mask[0] = 1;
    CHECK(l.fingerprint() != base);

    auto s = ds;
    s.split[39] = data::Split::validation;
    CHECK(s.fingerprint() != base);
}

TEST_CASE("make_examples exposes observed labels over raw sample spans") {
    const auto ds = data::flip_labels(tiny_ds(), {0.25, 5, data::FlipMode::binary_complement});
    const auto train = data::make_examples(ds, data::Split::train);
    REQUIRE(train.size() == 40);
    for (std::size_t i = 0; i < train.size(); ++i) {
        CHECK(train[i].label == ds.observed_labels[i]);
        CHECK(train[i].input.data() == ds.sample(i).data());
    }

    const std::vector<std::size_t> picks{41, 44};
    const auto val = data::make_examples(ds, picks);
    REQUIRE(val.size() == 2);
    CHECK(val[0].input.data() == ds.sample(41).data());
    CHECK(val[1].label == ds.observed_labels[44]);
}

TEST_CASE("split names round-trip") {
    for (auto s : {data::Split::train, data::Split::validation, data::Split::test})
        CHECK(data::split_from_name(data::split_name(s)) == s);
    CHECK_THROWS_AS(data::split_from_name("dev"), Error);
}
