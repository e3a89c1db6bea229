#include "datalens/harness/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "datalens/common/error.hpp"

namespace datalens::harness {

const char* direction_name(Direction d) {
    switch (d) {
    case Direction::low_first: return "low_first";
    case Direction::high_first: return "high_first";
    case Direction::absolute_high_first: return "absolute_high_first";
    }
    fail(Error::Kind::internal, "unknown ranking direction");
}

Direction direction_from_name(std::string_view name) {
    if (name == "low_first") return Direction::low_first;
    if (name == "high_first") return Direction::high_first;
    if (name == "absolute_high_first") return Direction::absolute_high_first;
    fail(Error::Kind::config, "unknown ranking direction '" + std::string(name) + "'");
}

std::vector<std::size_t> rank(std::span<const double> values, Direction direction) {
    for (std::size_t i = 0; i < values.size(); ++i)
        require(std::isfinite(values[i]), Error::Kind::numeric,
                "rank: non-finite score at sample " + std::to_string(i));

    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    auto key = [&](std::size_t i) {
        switch (direction) {
        case Direction::low_first: return -values[i];
        case Direction::high_first: return values[i];
        case Direction::absolute_high_first: return std::fabs(values[i]);
        }
        return 0.0;
    };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ka = key(a), kb = key(b);
        if (ka != kb) return ka > kb; // larger key = more suspicious = earlier
        return a < b;
    });
    return order;
}

std::vector<std::size_t> rank(const scoring::ScoreVector& scores, Direction direction) {
    return rank(std::span<const double>(scores.values), direction);
}

} // namespace datalens::harness
