#include "datalens/scoring/random_scores.hpp"

#include "datalens/common/error.hpp"
#include "datalens/common/rng.hpp"

namespace datalens::scoring {

ScoreVector random_scores(std::size_t n, std::uint64_t seed) {
    require(n >= 1, Error::Kind::config, "random_scores: n must be >= 1");
    ScoreVector sv;
    sv.method = "random";
    sv.direction_semantics = "high = suspicious (uniform baseline)";
    sv.values.reserve(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) sv.values.push_back(u01(rng));
    sv.meta = {{"method", "random"}, {"seed", seed}, {"n_train", n}};
    return sv;
}

} // namespace datalens::scoring
