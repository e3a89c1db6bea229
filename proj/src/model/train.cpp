#include "datalens/model/train.hpp"

#include <cmath>
#include <numeric>

#include "datalens/common/error.hpp"
#include "datalens/common/rng.hpp"
#include "datalens/model/eval.hpp"
#include "datalens/numerics/derivatives.hpp"

namespace datalens::model {

namespace {

void validate(const TrainConfig& cfg) {
    require(cfg.epochs >= 1, Error::Kind::config, "train: epochs must be >= 1");
    require(cfg.batch_size >= 1, Error::Kind::config, "train: batch_size must be >= 1");
    require(cfg.learning_rate > 0.0, Error::Kind::config,
            "train: learning_rate must be positive");
    require(cfg.optimizer == "adam" || cfg.optimizer == "sgd", Error::Kind::config,
            "train: optimizer must be adam or sgd, got '" + cfg.optimizer + "'");
    require(cfg.momentum >= 0.0 && cfg.momentum < 1.0, Error::Kind::config,
            "train: momentum must be in [0, 1)");
    require(cfg.beta1 > 0.0 && cfg.beta1 < 1.0 && cfg.beta2 > 0.0 && cfg.beta2 < 1.0,
            Error::Kind::config, "train: adam betas must be in (0, 1)");
}

double mean_sequential(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

} // namespace

TrainResult train_model(const ArchitectureSpec& arch,
                        std::span<const TrainingExample> train_set,
                        std::span<const TrainingExample> val_set, const TrainConfig& cfg) {
    validate(cfg);
    require(!train_set.empty(), Error::Kind::config, "train: empty training split");
    require(!val_set.empty(), Error::Kind::config, "train: empty validation split");
    for (std::size_t i = 0; i < train_set.size(); ++i)
        require(train_set[i].label >= 0 && train_set[i].label < arch.num_classes,
                Error::Kind::config,
                "train: sample " + std::to_string(i) + " has label " +
                    std::to_string(train_set[i].label) + " outside [0, " +
                    std::to_string(arch.num_classes) + ")");

    TrainResult result;
    result.model = init_model(arch, derive_seed(cfg.seed, 0));
    ModelState& model = result.model;
    const std::size_t P = model.layout.total_params;
    const std::size_t n = train_set.size();

    std::vector<double> grad(P, 0.0);
    std::vector<double> adam_m, adam_v, velocity;
    if (cfg.optimizer == "adam") {
        adam_m.assign(P, 0.0);
        adam_v.assign(P, 0.0);
    } else {
        velocity.assign(P, 0.0);
    }
    long step = 0;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<TrainingExample> batch;
    batch.reserve(static_cast<std::size_t>(cfg.batch_size));

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(cfg.seed, 1 + static_cast<std::uint64_t>(epoch)));
        std::iota(order.begin(), order.end(), std::size_t{0});
        shuffle(order, shuffle_rng);

        int batch_index = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size, ++batch_index) {
            const std::size_t stop = std::min(n, start + cfg.batch_size);
            batch.clear();
            for (std::size_t i = start; i < stop; ++i) batch.push_back(train_set[order[i]]);

            try {
                numerics::batch_gradient(model, batch, grad, cfg.threads);
            } catch (const Error& e) {
                if (e.kind() != Error::Kind::numeric) throw;
                fail(Error::Kind::numeric,
                     "epoch " + std::to_string(epoch + 1) + ", batch " +
                         std::to_string(batch_index) + ": " + e.what());
            }

            ++step;
            double* theta = model.params.values.data();
            if (cfg.optimizer == "adam") {
                const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
                const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
                for (std::size_t i = 0; i < P; ++i) {
                    adam_m[i] = cfg.beta1 * adam_m[i] + (1.0 - cfg.beta1) * grad[i];
                    adam_v[i] = cfg.beta2 * adam_v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
                    const double mh = adam_m[i] / bc1;
                    const double vh = adam_v[i] / bc2;
                    theta[i] -= cfg.learning_rate * mh / (std::sqrt(vh) + cfg.epsilon);
                }
            } else {
                for (std::size_t i = 0; i < P; ++i) {
                    velocity[i] = cfg.momentum * velocity[i] - cfg.learning_rate * grad[i];
                    theta[i] += velocity[i];
                }
            }
        }

        EpochMetrics em;
        em.epoch = epoch + 1;
        em.train_loss =
            mean_sequential(numerics::per_example_losses(model, train_set, cfg.threads));
        em.train_accuracy = accuracy(model, train_set, cfg.threads);
        em.val_loss =
            mean_sequential(numerics::per_example_losses(model, val_set, cfg.threads));
        em.val_accuracy = accuracy(model, val_set, cfg.threads);
        result.history.push_back(em);
    }

    model.params.validate();
    return result;
}

} // namespace datalens::model
