#pragma once

#include <cstdint>

#include "datalens/scoring/score_vector.hpp"

namespace datalens::scoring {

// Seeded uniform [0,1) baseline; the ranking direction is immaterial.
ScoreVector random_scores(std::size_t n, std::uint64_t seed);

} // namespace datalens::scoring
