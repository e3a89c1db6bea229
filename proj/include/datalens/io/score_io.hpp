#pragma once

#include <filesystem>

#include "datalens/scoring/score_vector.hpp"

namespace datalens::io {

// Scores persist as a two-column CSV (sample_index,score) with a JSON
// sidecar at <path>.meta.json carrying method, direction semantics, and the
// solver metadata. Values round-trip bit-exactly.
void save_scores(const scoring::ScoreVector& scores, const std::filesystem::path& path);
scoring::ScoreVector load_scores(const std::filesystem::path& path);

} // namespace datalens::io
