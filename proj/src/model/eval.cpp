#include "datalens/model/eval.hpp"

#include "datalens/common/error.hpp"
#include "datalens/common/parallel.hpp"
#include "datalens/model/network.hpp"

namespace datalens::model {

std::vector<int> predict(const ModelState& m, std::span<const TrainingExample> batch,
                         int threads) {
    std::vector<int> labels(batch.size(), 0);
    for_chunks(batch.size(), threads, [&](std::size_t lo, std::size_t hi, std::size_t) {
        NetWorkspace<double> ws;
        ws.resize(m.arch, m.layout);
        for (std::size_t i = lo; i < hi; ++i) {
            net_forward<double>(m.arch, m.layout, m.params.values, batch[i].input, ws);
            int best = 0;
            for (int c = 1; c < m.arch.num_classes; ++c)
                if (ws.logits[c] > ws.logits[best]) best = c;
            labels[i] = best;
        }
    });
    return labels;
}

double accuracy(const ModelState& m, std::span<const TrainingExample> batch, int threads) {
    require(!batch.empty(), Error::Kind::config, "accuracy: empty batch");
    const std::vector<int> pred = predict(m, batch, threads);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < batch.size(); ++i)
        if (pred[i] == batch[i].label) ++hits;
    return static_cast<double>(hits) / static_cast<double>(batch.size());
}

std::vector<double> predict_proba(const ModelState& m, const TrainingExample& ex) {
    NetWorkspace<double> ws;
    ws.resize(m.arch, m.layout);
    net_forward<double>(m.arch, m.layout, m.params.values, ex.input, ws);
    softmax_cross_entropy<double>(ws.logits, 0, ws.probs);
    return std::vector<double>(ws.probs.begin(), ws.probs.end());
}

FeatureMatrix features(const ModelState& m, std::span<const TrainingExample> batch,
                       int threads) {
    FeatureMatrix out;
    out.rows = batch.size();
    out.cols = static_cast<std::size_t>(m.layout.feature_dim);
    out.values.assign(out.rows * out.cols, 0.0);

    for_chunks(batch.size(), threads, [&](std::size_t lo, std::size_t hi, std::size_t) {
        NetWorkspace<double> ws;
        ws.resize(m.arch, m.layout);
        for (std::size_t i = lo; i < hi; ++i) {
            require(batch[i].input.size() ==
                        static_cast<std::size_t>(m.arch.input_channels) * m.arch.input_length,
                    Error::Kind::config, "features: sample shape does not match the model");
            net_forward<double>(m.arch, m.layout, m.params.values, batch[i].input, ws);
            std::copy(ws.features.begin(), ws.features.end(),
                      out.values.begin() + i * out.cols);
        }
    });
    return out;
}

} // namespace datalens::model
