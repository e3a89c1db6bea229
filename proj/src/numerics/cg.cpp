#include "datalens/numerics/cg.hpp"

#include <cmath>
#include <string>

#include "datalens/common/error.hpp"

namespace datalens::numerics {

CgResult cg_solve(const LinearOperator& op, const std::vector<double>& rhs,
                  double damping, double tol, int max_iter) {
    require(op.dimension == rhs.size(), Error::Kind::config,
            "cg_solve: rhs dimension " + std::to_string(rhs.size()) +
                " does not match operator dimension " + std::to_string(op.dimension));
    require(damping >= 0.0, Error::Kind::config, "cg_solve: damping must be >= 0");

    const std::size_t n = rhs.size();
    CgResult res;
    res.x.assign(n, 0.0);

    const double rhs_norm = norm2(rhs);
    if (rhs_norm == 0.0) {
        res.converged = true;
        return res;
    }
    const double target = tol * rhs_norm;

    auto apply = [&](const std::vector<double>& v) {
        std::vector<double> out = op.apply(v);
        require(out.size() == n, Error::Kind::internal, "cg_solve: operator changed dimension");
        if (damping != 0.0) axpy(damping, v, out);
        return out;
    };

    std::vector<double> r = rhs; // residual of x = 0
    std::vector<double> p = r;
    double rr = dot(r, r);

    // keep the iterate with the smallest residual; CG's 2-norm residual can
    // wiggle even though the A-norm error is monotone
    std::vector<double> best_x = res.x;
    double best_res = rhs_norm;

    for (int k = 0; k < max_iter; ++k) {
        const std::vector<double> ap = apply(p);
        const double pap = dot(p, ap);
        if (!std::isfinite(pap))
            fail(Error::Kind::numeric,
                 "cg_solve: non-finite curvature at iteration " + std::to_string(k));
        if (pap <= 0.0)
            fail(Error::Kind::numeric,
                 "cg_solve: non-positive curvature at iteration " + std::to_string(k) +
                     "; operator is not positive definite (increase damping)");

        const double alpha = rr / pap;
        axpy(alpha, p, res.x);
        axpy(-alpha, ap, r);

        const double rr_next = dot(r, r);
        const double rnorm = std::sqrt(rr_next);
        if (!std::isfinite(rnorm))
            fail(Error::Kind::numeric,
                 "cg_solve: non-finite residual at iteration " + std::to_string(k));

        res.iterations = k + 1;
        if (rnorm < best_res) {
            best_res = rnorm;
            best_x = res.x;
        }
        res.residual_history.push_back(best_res);

        if (rnorm <= target) {
            res.converged = true;
            break;
        }

        const double beta = rr_next / rr;
        rr = rr_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }

    res.x = std::move(best_x);
    res.residual_norm = best_res;
    if (best_res <= target) res.converged = true;
    return res;
}

CgParamResult cg_solve(const LinearOperator& op, const ParamVector& rhs,
                       double damping, double tol, int max_iter) {
    CgResult raw = cg_solve(op, rhs.values, damping, tol, max_iter);
    CgParamResult out;
    out.x.values = std::move(raw.x);
    out.x.segments = rhs.segments;
    out.iterations = raw.iterations;
    out.residual_norm = raw.residual_norm;
    out.converged = raw.converged;
    return out;
}

} // namespace datalens::numerics
