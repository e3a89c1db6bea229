#pragma once

#include <vector>

#include "datalens/data/dataset.hpp"
#include "datalens/scoring/score_vector.hpp"

namespace datalens::scoring {

struct RepresenterConfig {
    double lambda = 0.01; // L2 strength on the refit weights
    double tolerance = 1e-6; // refit target: Frobenius norm of the objective gradient
    int max_steps = 100;     // Newton steps
    int threads = 1;
};

// Output of the frozen-feature refit. The final dense layer (k x d, no bias)
// is refit on the train split minimizing mean cross-entropy + lambda*||W||_F^2;
// at the optimum W decomposes exactly as sum_i alpha_i phi_i^T, so any probe's
// pre-softmax output satisfies f(x) = sum_i alpha_i (phi_i . phi(x)).
struct RepresenterResult {
    ScoreVector scores;          // alpha_i[observed label], one per train sample
    std::vector<double> weights; // refit W, k x feature_dim row-major
    std::vector<double> alphas;  // n_train x k row-major
    double grad_norm = 0.0;
    int newton_steps = 0;
};

// Errors with Error::Kind::numeric (carrying the final gradient norm) when
// the refit cannot reach cfg.tolerance within cfg.max_steps.
RepresenterResult representer_analysis(const model::ModelState& m,
                                       const data::TimeSeriesDataset& ds,
                                       const RepresenterConfig& cfg);

// direction: "low = inhibitory, high = excitatory"
ScoreVector representer_scores(const model::ModelState& m,
                               const data::TimeSeriesDataset& ds,
                               const RepresenterConfig& cfg);

} // namespace datalens::scoring
