#include "datalens/numerics/derivatives.hpp"

#include <algorithm>
#include <string>

#include "datalens/common/error.hpp"
#include "datalens/common/parallel.hpp"

namespace datalens::numerics {

using model::ModelState;
using model::NetWorkspace;
using model::TrainingExample;

namespace {

std::size_t chunk_count(std::size_t n) {
    return n < kParallelChunks ? n : kParallelChunks;
}

[[noreturn]] void bad_sample(std::size_t index) {
    fail(Error::Kind::numeric,
         "non-finite loss at sample " + std::to_string(index) +
             "; check the input values or lower the learning rate");
}

} // namespace

double batch_loss(const ModelState& m, std::span<const TrainingExample> batch,
                  int threads) {
    require(!batch.empty(), Error::Kind::config, "batch_loss: empty batch");
    const std::size_t nc = chunk_count(batch.size());
    std::vector<double> partial(nc, 0.0);

    for_chunks(batch.size(), threads, [&](std::size_t lo, std::size_t hi, std::size_t c) {
        NetWorkspace<double> ws;
        ws.resize(m.arch, m.layout);
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            net_forward<double>(m.arch, m.layout, m.params.values, batch[i].input, ws);
            const double l = model::softmax_cross_entropy<double>(
                ws.logits, batch[i].label, ws.probs);
            if (!std::isfinite(l)) bad_sample(i);
            acc += l;
        }
        partial[c] = acc;
    });

    double total = 0.0;
    for (double p : partial) total += p;
    return total / static_cast<double>(batch.size());
}

std::vector<double> per_example_losses(const ModelState& m,
                                       std::span<const TrainingExample> batch,
                                       int threads) {
    std::vector<double> losses(batch.size(), 0.0);
    for_chunks(batch.size(), threads, [&](std::size_t lo, std::size_t hi, std::size_t) {
        NetWorkspace<double> ws;
        ws.resize(m.arch, m.layout);
        for (std::size_t i = lo; i < hi; ++i) {
            net_forward<double>(m.arch, m.layout, m.params.values, batch[i].input, ws);
            const double l = model::softmax_cross_entropy<double>(
                ws.logits, batch[i].label, ws.probs);
            if (!std::isfinite(l)) bad_sample(i);
            losses[i] = l;
        }
    });
    return losses;
}

double batch_gradient(const ModelState& m, std::span<const TrainingExample> batch,
                      std::span<double> grad_out, int threads) {
    require(!batch.empty(), Error::Kind::config, "batch_gradient: empty batch");
    require(grad_out.size() == m.layout.total_params, Error::Kind::internal,
            "batch_gradient: gradient buffer has the wrong size");

    const std::size_t nc = chunk_count(batch.size());
    const std::size_t P = m.layout.total_params;
    std::vector<std::vector<double>> partial_grad(nc);
    std::vector<double> partial_loss(nc, 0.0);

    for_chunks(batch.size(), threads, [&](std::size_t lo, std::size_t hi, std::size_t c) {
        NetWorkspace<double> ws;
        ws.resize(m.arch, m.layout);
        auto& g = partial_grad[c];
        g.assign(P, 0.0);
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            const double l = model::net_loss_grad<double>(
                m.arch, m.layout, m.params.values, batch[i].input, batch[i].label, ws, g);
            if (!std::isfinite(l)) bad_sample(i);
            acc += l;
        }
        partial_loss[c] = acc;
    });

    std::fill(grad_out.begin(), grad_out.end(), 0.0);
    double total = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
        axpy(1.0, partial_grad[c], grad_out);
        total += partial_loss[c];
    }
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    scale(grad_out, inv_n);
    return total * inv_n;
}

std::vector<double> batch_hvp(const ModelState& m, std::span<const TrainingExample> batch,
                              std::span<const double> v, int threads) {
    require(!batch.empty(), Error::Kind::config, "batch_hvp: empty batch");
    const std::size_t P = m.layout.total_params;
    require(v.size() == P, Error::Kind::internal, "batch_hvp: direction has the wrong size");

    // parameters carry the direction as their tangent; the tangent of the
    // resulting gradient is exactly H*v
    std::vector<Dual> params(P);
    for (std::size_t i = 0; i < P; ++i) params[i] = Dual(m.params.values[i], v[i]);

    const std::size_t nc = chunk_count(batch.size());
    std::vector<std::vector<Dual>> partial(nc);

    for_chunks(batch.size(), threads, [&](std::size_t lo, std::size_t hi, std::size_t c) {
        NetWorkspace<Dual> ws;
        ws.resize(m.arch, m.layout);
        auto& g = partial[c];
        g.assign(P, Dual(0.0));
        for (std::size_t i = lo; i < hi; ++i) {
            const Dual l = model::net_loss_grad<Dual>(
                m.arch, m.layout, params, batch[i].input, batch[i].label, ws, g);
            if (!is_finite(l)) bad_sample(i);
        }
    });

    std::vector<double> hv(P, 0.0);
    for (std::size_t c = 0; c < nc; ++c)
        for (std::size_t i = 0; i < P; ++i) hv[i] += partial[c][i].t;
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    for (double& x : hv) x *= inv_n;
    return hv;
}

GradientEngine::GradientEngine(const ModelState& m) : model_(&m) {
    ws_.resize(m.arch, m.layout);
}

double GradientEngine::example_gradient(const TrainingExample& ex,
                                        std::span<double> grad_out) {
    require(grad_out.size() == model_->layout.total_params, Error::Kind::internal,
            "example_gradient: gradient buffer has the wrong size");
    std::fill(grad_out.begin(), grad_out.end(), 0.0);
    const double l = model::net_loss_grad<double>(model_->arch, model_->layout,
                                                  model_->params.values, ex.input,
                                                  ex.label, ws_, grad_out);
    require(std::isfinite(l), Error::Kind::numeric, "non-finite loss for probe sample");
    return l;
}

LinearOperator make_hessian_operator(const ModelState& m,
                                     std::span<const TrainingExample> batch,
                                     int threads) {
    LinearOperator op;
    op.dimension = m.layout.total_params;
    op.apply = [&m, batch, threads](const std::vector<double>& v) {
        return batch_hvp(m, batch, v, threads);
    };
    return op;
}

StochasticHvp make_stochastic_hvp(const ModelState& m,
                                  std::span<const TrainingExample> batch,
                                  int batch_size, int threads) {
    require(batch_size > 0, Error::Kind::config, "lissa batch size must be positive");
    return [&m, batch, batch_size, threads](Rng& rng, const std::vector<double>& v) {
        std::vector<TrainingExample> mini(static_cast<std::size_t>(batch_size));
        for (auto& ex : mini) {
            const auto j = static_cast<std::size_t>(
                uniform_int(rng, 0, static_cast<std::int64_t>(batch.size()) - 1));
            ex = batch[j];
        }
        return batch_hvp(m, mini, v, threads);
    };
}

} // namespace datalens::numerics
