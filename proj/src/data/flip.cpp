#include "datalens/data/flip.hpp"

#include <cmath>
#include <string>

#include "datalens/common/error.hpp"
#include "datalens/common/rng.hpp"

namespace datalens::data {

const char* flip_mode_name(FlipMode m) {
    return m == FlipMode::binary_complement ? "binary_complement" : "uniform_other_class";
}

FlipMode flip_mode_from_name(std::string_view name) {
    if (name == "binary_complement") return FlipMode::binary_complement;
    if (name == "uniform_other_class") return FlipMode::uniform_other_class;
    fail(Error::Kind::config, "unknown flip mode '" + std::string(name) + "'");
}

TimeSeriesDataset flip_labels(const TimeSeriesDataset& ds, const FlipSpec& spec) {
    require(spec.rate >= 0.0 && spec.rate <= 1.0, Error::Kind::config,
            "flip rate must be in [0, 1]");
    for (std::size_t i = 0; i < ds.size(); ++i)
        require(!ds.flip_mask[i], Error::Kind::config,
                "flip_labels: dataset already contains flips (sample " +
                    std::to_string(i) + ")");
    require(spec.mode != FlipMode::binary_complement || ds.num_classes == 2,
            Error::Kind::config,
            "binary_complement flips require a 2-class dataset, got " +
                std::to_string(ds.num_classes) + " classes");

    std::vector<std::size_t> train = ds.split_indices(Split::train);
    const auto count = static_cast<std::size_t>(
        std::llround(spec.rate * static_cast<double>(train.size())));

    Rng rng(spec.seed);
    shuffle(train, rng);

    TimeSeriesDataset out = ds;
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t i = train[k];
        const int old = out.observed_labels[i];
        int flipped;
        if (spec.mode == FlipMode::binary_complement) {
            flipped = 1 - old;
        } else {
            // uniform over the other k-1 classes, skipping the old label
            const auto draw = static_cast<int>(uniform_int(rng, 0, ds.num_classes - 2));
            flipped = draw < old ? draw : draw + 1;
        }
        out.observed_labels[i] = flipped;
        out.flip_mask[i] = 1;
    }
    out.validate();
    return out;
}

} // namespace datalens::data
