#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "datalens/common/rng.hpp"
#include "datalens/numerics/param_vector.hpp"

namespace datalens::numerics {

// One stochastic application v -> H_batch v; the callback draws its own batch
// from the rng it is handed, which is the only randomness in the recursion.
using StochasticHvp = std::function<std::vector<double>(Rng&, const std::vector<double>&)>;

struct LissaConfig {
    double damping = 0.01;
    double scale = 10.0; // must exceed the largest eigenvalue of H + damping
    int depth = 5000;
    int repeats = 10;
    std::uint64_t seed = 0;
};

// Truncated Neumann-series estimate of (H + damping I)^{-1} rhs, averaged
// over `repeats` independently seeded recursions. Deterministic for a fixed
// seed. Aborts with Error::Kind::numeric when an iterate norm grows 10x past
// the largest norm a converged recursion can reach (scale/damping too small);
// the converged iterate is scale * (H + damping I)^{-1} rhs, so the cap
// scales with scale/damping rather than with ||rhs|| alone.
std::vector<double> lissa_solve(const StochasticHvp& hvp, const std::vector<double>& rhs,
                                const LissaConfig& cfg);

ParamVector lissa_solve(const StochasticHvp& hvp, const ParamVector& rhs,
                        const LissaConfig& cfg);

} // namespace datalens::numerics
