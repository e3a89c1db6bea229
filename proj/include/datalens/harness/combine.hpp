#pragma once

#include <span>
#include <vector>

#include "datalens/harness/ranking.hpp"
#include "datalens/scoring/score_vector.hpp"

namespace datalens::harness {

struct CombineInput {
    const scoring::ScoreVector* scores = nullptr;
    Direction direction = Direction::high_first; // how this method flags suspicion
    double weight = 0.0;                         // >= 0; all weights sum to 1
};

// Each constituent's ranking key (direction applied, so larger = more
// suspicious) is min-max normalized to [0,1]; constant keys map to all-0 so
// the constituent is inert. Output = weighted sum, direction
// "high = suspicious".
scoring::ScoreVector combine(std::span<const CombineInput> inputs);

} // namespace datalens::harness
