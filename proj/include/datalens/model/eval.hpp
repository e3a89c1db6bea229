#pragma once

#include <span>
#include <vector>

#include "datalens/model/model_state.hpp"

namespace datalens::model {

// argmax class per example; ties resolve to the lowest class index
std::vector<int> predict(const ModelState& m, std::span<const TrainingExample> batch,
                         int threads = 1);

double accuracy(const ModelState& m, std::span<const TrainingExample> batch,
                int threads = 1);

// softmax probabilities for a single example
std::vector<double> predict_proba(const ModelState& m, const TrainingExample& ex);

// row-major n x feature_dim matrix of Phi(x), the final dense layer's input
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    std::span<const double> row(std::size_t i) const {
        return {values.data() + i * cols, cols};
    }
};

FeatureMatrix features(const ModelState& m, std::span<const TrainingExample> batch,
                       int threads = 1);

} // namespace datalens::model
