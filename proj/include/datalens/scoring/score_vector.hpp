#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace datalens::scoring {

// One real score per train-split sample, tagged with enough context to
// interpret and reproduce it. `direction_semantics` states what low/high
// mean for this method; rankings choose their direction on top of it.
struct ScoreVector {
    std::string method;
    bool classwise = false;
    std::string direction_semantics;
    std::vector<double> values;
    nlohmann::json meta; // solver settings, convergence stats, warnings

    // throws unless every value is finite and the length matches n_train
    void validate(std::size_t n_train) const;
};

} // namespace datalens::scoring
