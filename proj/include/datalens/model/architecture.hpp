#pragma once

#include <cstddef>
#include <vector>

#include "datalens/numerics/param_vector.hpp"

namespace datalens::model {

struct ConvBlockSpec {
    int filters = 0;
    int kernel_size = 0;
    bool pool = false; // max-pool window 2, stride 2
};

// The fixed classifier family: a stack of valid 1-D conv blocks
// (conv -> ReLU -> optional maxpool), flatten, an optional hidden dense+ReLU
// layer, and a final dense layer producing one logit per class.
struct ArchitectureSpec {
    int input_channels = 0;
    int input_length = 0;
    std::vector<ConvBlockSpec> conv_blocks;
    int dense_units = 0; // 0 = no hidden dense layer
    int num_classes = 0;
};

struct BlockShape {
    int in_channels = 0;
    int in_length = 0;
    int conv_length = 0;   // in_length - kernel + 1
    int out_length = 0;    // after optional pooling
};

// Shapes and the flat parameter layout derived from an ArchitectureSpec.
// Segment order is fixed: conv1.weight, conv1.bias, ..., hidden.weight,
// hidden.bias, output.weight, output.bias.
struct NetworkLayout {
    std::vector<BlockShape> blocks;
    int flatten_size = 0;
    int feature_dim = 0; // width of the final dense layer's input Phi(x)
    std::vector<numerics::Segment> segments;
    std::size_t total_params = 0;

    // cached offsets for the hot kernels
    struct ConvOffsets {
        std::size_t weight = 0;
        std::size_t bias = 0;
    };
    std::vector<ConvOffsets> conv;
    std::size_t hidden_weight = 0, hidden_bias = 0; // valid iff dense_units > 0
    std::size_t output_weight = 0, output_bias = 0;
};

// Validates the spec (class count, kernel vs length at every block, pooling
// room) and computes the layout. Throws Error::Kind::config on violations.
NetworkLayout make_layout(const ArchitectureSpec& spec);

// conv(16,5,pool) -> conv(32,5,pool) -> dense(num_classes), dropping blocks
// that no longer fit the input length.
ArchitectureSpec default_architecture(int channels, int length, int num_classes);

} // namespace datalens::model
