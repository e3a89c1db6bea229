#include "datalens/scoring/loss_scores.hpp"

#include "datalens/common/error.hpp"
#include "datalens/common/text.hpp"
#include "datalens/numerics/derivatives.hpp"

namespace datalens::scoring {

void ScoreVector::validate(std::size_t n_train) const {
    require(values.size() == n_train, Error::Kind::config,
            "score vector '" + method + "' has " + std::to_string(values.size()) +
                " values for " + std::to_string(n_train) + " train samples");
    for (std::size_t i = 0; i < values.size(); ++i)
        require(std::isfinite(values[i]), Error::Kind::numeric,
                "score vector '" + method + "' has a non-finite value at sample " +
                    std::to_string(i));
}

ScoreVector loss_scores(const model::ModelState& m, const data::TimeSeriesDataset& ds,
                        int threads) {
    const auto train = data::make_examples(ds, data::Split::train);
    require(!train.empty(), Error::Kind::config, "loss_scores: empty train split");
    require(ds.channels == m.arch.input_channels && ds.length == m.arch.input_length &&
                ds.num_classes == m.arch.num_classes,
            Error::Kind::config, "loss_scores: dataset shape does not match the model");

    ScoreVector sv;
    sv.method = "loss";
    sv.direction_semantics = "high = suspicious";
    sv.values = numerics::per_example_losses(m, train, threads);
    sv.meta = {{"method", "loss"},
               {"dataset_fingerprint", hex64(ds.fingerprint())},
               {"n_train", train.size()}};
    sv.validate(train.size());
    return sv;
}

} // namespace datalens::scoring
