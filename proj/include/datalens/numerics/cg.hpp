#pragma once

#include <vector>

#include "datalens/numerics/linear_operator.hpp"
#include "datalens/numerics/param_vector.hpp"

namespace datalens::numerics {

struct CgResult {
    std::vector<double> x;
    int iterations = 0;
    double residual_norm = 0.0;     // ||(A + damping I) x - rhs||_2 of the returned x
    bool converged = false;
    std::vector<double> residual_history; // non-increasing, one entry per iteration
};

// Conjugate gradient on (op + damping*I) x = rhs for symmetric positive
// (semi)definite op. Stops when ||r|| <= tol * ||rhs|| or after max_iter
// iterations. The returned iterate is the best one seen, so the reported
// residual history never increases. A zero rhs returns zero in 0 iterations;
// NaN/Inf in the iterates or a non-positive curvature direction aborts with
// Error::Kind::numeric naming the iteration.
CgResult cg_solve(const LinearOperator& op, const std::vector<double>& rhs,
                  double damping, double tol, int max_iter);

// same solve, keeping the segment layout of rhs
struct CgParamResult {
    ParamVector x;
    int iterations = 0;
    double residual_norm = 0.0;
    bool converged = false;
};
CgParamResult cg_solve(const LinearOperator& op, const ParamVector& rhs,
                       double damping, double tol, int max_iter);

} // namespace datalens::numerics
