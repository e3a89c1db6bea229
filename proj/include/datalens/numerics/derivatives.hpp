#pragma once

#include <span>
#include <vector>

#include "datalens/common/rng.hpp"
#include "datalens/model/model_state.hpp"
#include "datalens/model/network.hpp"
#include "datalens/numerics/lissa.hpp"
#include "datalens/numerics/linear_operator.hpp"

namespace datalens::numerics {

// Derivatives of the mean cross-entropy over a batch. All reductions sum
// per-chunk partials in chunk order (fixed grid, see parallel.hpp), so the
// result is bit-identical for any thread count. A non-finite per-example
// loss raises Error::Kind::numeric naming the offending sample.

double batch_loss(const model::ModelState& m,
                  std::span<const model::TrainingExample> batch, int threads = 1);

std::vector<double> per_example_losses(const model::ModelState& m,
                                       std::span<const model::TrainingExample> batch,
                                       int threads = 1);

// gradient of the mean loss; returns the mean loss
double batch_gradient(const model::ModelState& m,
                      std::span<const model::TrainingExample> batch,
                      std::span<double> grad_out, int threads = 1);

// exact (Hessian of mean loss) * v via forward-over-reverse
std::vector<double> batch_hvp(const model::ModelState& m,
                              std::span<const model::TrainingExample> batch,
                              std::span<const double> v, int threads = 1);

// Reusable single-example gradient engine (owns its workspace); grad_out is
// overwritten, not accumulated. Returns the example loss.
class GradientEngine {
public:
    explicit GradientEngine(const model::ModelState& m);
    double example_gradient(const model::TrainingExample& ex, std::span<double> grad_out);

private:
    const model::ModelState* model_;
    model::NetWorkspace<double> ws_;
};

// H as a LinearOperator (no damping; cg_solve adds its own)
LinearOperator make_hessian_operator(const model::ModelState& m,
                                     std::span<const model::TrainingExample> batch,
                                     int threads = 1);

// minibatch Hessian estimator for LiSSA; draws `batch_size` indices uniformly
// with replacement from `batch` on each call
StochasticHvp make_stochastic_hvp(const model::ModelState& m,
                                  std::span<const model::TrainingExample> batch,
                                  int batch_size, int threads = 1);

} // namespace datalens::numerics
