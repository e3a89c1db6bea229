#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "datalens/scoring/score_vector.hpp"

namespace datalens::harness {

enum class Direction { low_first, high_first, absolute_high_first };

const char* direction_name(Direction d);
Direction direction_from_name(std::string_view name);

// Permutation of train-sample positions, most suspicious first under the
// given direction. Ties break by ascending sample index so the order is a
// total, deterministic one.
std::vector<std::size_t> rank(std::span<const double> values, Direction direction);
std::vector<std::size_t> rank(const scoring::ScoreVector& scores, Direction direction);

} // namespace datalens::harness
