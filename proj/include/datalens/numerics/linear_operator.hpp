#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace datalens::numerics {

// Matrix-free symmetric operator v -> A v. Used for Hessians and for the
// damped systems (H + delta*I) the influence solvers work on; apply must be
// deterministic for a fixed operand.
struct LinearOperator {
    std::size_t dimension = 0;
    std::function<std::vector<double>(const std::vector<double>&)> apply;
};

} // namespace datalens::numerics
