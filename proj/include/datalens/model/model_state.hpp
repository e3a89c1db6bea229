#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "datalens/model/architecture.hpp"
#include "datalens/numerics/param_vector.hpp"

namespace datalens::model {

// one sample as seen by the network: channel-major values, observed label
struct TrainingExample {
    std::span<const double> input;
    int label = 0;
};

struct ModelState {
    ArchitectureSpec arch;
    NetworkLayout layout;
    numerics::ParamVector params;
};

// Fan-in uniform init, U(-sqrt(1/fan_in), +sqrt(1/fan_in)) per layer, biases
// included. Draw order follows the segment layout so a seed pins every weight.
ModelState init_model(const ArchitectureSpec& spec, std::uint64_t seed);

// JSON checkpoint, round-trip exact (doubles serialized shortest-round-trip).
void save_model(const ModelState& model, const std::string& path);
ModelState load_model(const std::string& path);

std::string model_format_name();

} // namespace datalens::model
