#include "datalens/harness/combine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "datalens/common/error.hpp"

namespace datalens::harness {

using nlohmann::json;

scoring::ScoreVector combine(std::span<const CombineInput> inputs) {
    require(!inputs.empty(), Error::Kind::config, "combine: need at least one constituent");
    double weight_sum = 0.0;
    for (const auto& in : inputs) {
        require(in.scores != nullptr, Error::Kind::internal, "combine: null constituent");
        require(in.weight >= 0.0, Error::Kind::config, "combine: weights must be >= 0");
        weight_sum += in.weight;
    }
    require(std::fabs(weight_sum - 1.0) <= 1e-9, Error::Kind::config,
            "combine: weights must sum to 1");

    const std::size_t n = inputs.front().scores->values.size();
    for (const auto& in : inputs)
        require(in.scores->values.size() == n, Error::Kind::config,
                "combine: constituent '" + in.scores->method +
                    "' length does not match the first constituent");

    scoring::ScoreVector out;
    out.method = "combined";
    out.direction_semantics = "high = suspicious";
    out.values.assign(n, 0.0);

    json constituents = json::array();
    for (const auto& in : inputs) {
        // suspicion key: larger = more suspicious under this method
        std::vector<double> key(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = in.scores->values[i];
            switch (in.direction) {
            case Direction::low_first: key[i] = -v; break;
            case Direction::high_first: key[i] = v; break;
            case Direction::absolute_high_first: key[i] = std::fabs(v); break;
            }
        }
        const auto [lo_it, hi_it] = std::minmax_element(key.begin(), key.end());
        const double lo = *lo_it, hi = *hi_it;
        if (hi > lo) {
            const double inv = 1.0 / (hi - lo);
            for (std::size_t i = 0; i < n; ++i)
                out.values[i] += in.weight * (key[i] - lo) * inv;
        }
        // constant keys contribute nothing (normalized to all-0)

        constituents.push_back({{"method", in.scores->method},
                                {"classwise", in.scores->classwise},
                                {"direction", direction_name(in.direction)},
                                {"weight", in.weight}});
    }
    out.meta = {{"method", "combined"}, {"constituents", constituents}};
    out.validate(n);
    return out;
}

} // namespace datalens::harness
