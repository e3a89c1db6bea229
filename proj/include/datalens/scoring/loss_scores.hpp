#pragma once

#include "datalens/data/dataset.hpp"
#include "datalens/scoring/score_vector.hpp"

namespace datalens::scoring {

// Cross-entropy of each train sample under its observed label.
// Direction: "high = suspicious".
ScoreVector loss_scores(const model::ModelState& m, const data::TimeSeriesDataset& ds,
                        int threads = 1);

} // namespace datalens::scoring
