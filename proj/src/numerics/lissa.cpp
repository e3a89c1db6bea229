#include "datalens/numerics/lissa.hpp"

#include <cmath>
#include <string>

#include "datalens/common/error.hpp"

namespace datalens::numerics {

std::vector<double> lissa_solve(const StochasticHvp& hvp, const std::vector<double>& rhs,
                                const LissaConfig& cfg) {
    require(cfg.depth >= 1 && cfg.repeats >= 1, Error::Kind::config,
            "lissa_solve: depth and repeats must be >= 1");
    require(cfg.scale > 0.0 && cfg.damping >= 0.0, Error::Kind::config,
            "lissa_solve: scale must be > 0 and damping >= 0");

    const std::size_t n = rhs.size();
    const double rhs_norm = norm2(rhs);
    std::vector<double> mean(n, 0.0);
    if (rhs_norm == 0.0) return mean;

    // Convergent recursions are bounded by scale/lambda_min * ||rhs||, which
    // with damping delta is at most scale/delta * ||rhs||. Anything 10x past
    // that cap is genuinely diverging, not just a large inverse.
    const double cap = 10.0 * cfg.scale / std::max(cfg.damping, 1e-3) * rhs_norm;

    const double inv_scale = 1.0 / cfg.scale;
    for (int rep = 0; rep < cfg.repeats; ++rep) {
        Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(rep)));
        std::vector<double> x = rhs;
        for (int j = 0; j < cfg.depth; ++j) {
            std::vector<double> hv = hvp(rng, x);
            require(hv.size() == n, Error::Kind::internal, "lissa_solve: sampler changed dimension");
            // x <- rhs + (I - (H + damping I)/scale) x
            for (std::size_t i = 0; i < n; ++i)
                x[i] = rhs[i] + x[i] - (hv[i] + cfg.damping * x[i]) * inv_scale;

            const double xnorm = norm2(x);
            if (!std::isfinite(xnorm) || xnorm > cap)
                fail(Error::Kind::numeric,
                     "lissa_solve: diverging at repeat " + std::to_string(rep) + ", step " +
                         std::to_string(j) + "; raise scale or damping");
        }
        axpy(inv_scale / cfg.repeats, x, mean);
    }
    return mean;
}

ParamVector lissa_solve(const StochasticHvp& hvp, const ParamVector& rhs,
                        const LissaConfig& cfg) {
    ParamVector out;
    out.values = lissa_solve(hvp, rhs.values, cfg);
    out.segments = rhs.segments;
    return out;
}

} // namespace datalens::numerics
