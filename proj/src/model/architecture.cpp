#include "datalens/model/architecture.hpp"

#include <string>

#include "datalens/common/error.hpp"

namespace datalens::model {

NetworkLayout make_layout(const ArchitectureSpec& spec) {
    require(spec.num_classes >= 2, Error::Kind::config, "architecture: num_classes must be >= 2");
    require(spec.input_channels >= 1 && spec.input_length >= 1, Error::Kind::config,
            "architecture: input shape must be positive");
    require(spec.dense_units >= 0, Error::Kind::config, "architecture: dense_units must be >= 0");

    NetworkLayout layout;
    int channels = spec.input_channels;
    int length = spec.input_length;

    std::size_t offset = 0;
    auto push_segment = [&](const std::string& name, std::size_t count) {
        layout.segments.push_back({name, offset, count});
        offset += count;
        return offset - count;
    };

    for (std::size_t b = 0; b < spec.conv_blocks.size(); ++b) {
        const ConvBlockSpec& blk = spec.conv_blocks[b];
        const std::string tag = "conv" + std::to_string(b + 1);
        require(blk.filters >= 1, Error::Kind::config, tag + ": filters must be >= 1");
        require(blk.kernel_size >= 1 && blk.kernel_size <= length, Error::Kind::config,
                tag + ": kernel_size " + std::to_string(blk.kernel_size) +
                    " exceeds input length " + std::to_string(length));

        BlockShape shape;
        shape.in_channels = channels;
        shape.in_length = length;
        shape.conv_length = length - blk.kernel_size + 1;
        if (blk.pool) {
            require(shape.conv_length >= 2, Error::Kind::config,
                    tag + ": no room to pool (conv output length " +
                        std::to_string(shape.conv_length) + ")");
            shape.out_length = shape.conv_length / 2;
        } else {
            shape.out_length = shape.conv_length;
        }
        layout.blocks.push_back(shape);

        NetworkLayout::ConvOffsets off;
        off.weight = push_segment(tag + ".weight",
                                  static_cast<std::size_t>(blk.filters) * channels * blk.kernel_size);
        off.bias = push_segment(tag + ".bias", static_cast<std::size_t>(blk.filters));
        layout.conv.push_back(off);

        channels = blk.filters;
        length = shape.out_length;
    }

    layout.flatten_size = channels * length;
    if (spec.dense_units > 0) {
        layout.hidden_weight = push_segment(
            "hidden.weight", static_cast<std::size_t>(spec.dense_units) * layout.flatten_size);
        layout.hidden_bias = push_segment("hidden.bias", static_cast<std::size_t>(spec.dense_units));
        layout.feature_dim = spec.dense_units;
    } else {
        layout.feature_dim = layout.flatten_size;
    }

    layout.output_weight = push_segment(
        "output.weight", static_cast<std::size_t>(spec.num_classes) * layout.feature_dim);
    layout.output_bias = push_segment("output.bias", static_cast<std::size_t>(spec.num_classes));
    layout.total_params = offset;
    return layout;
}

ArchitectureSpec default_architecture(int channels, int length, int num_classes) {
    ArchitectureSpec spec;
    spec.input_channels = channels;
    spec.input_length = length;
    spec.num_classes = num_classes;
    spec.dense_units = 0;

    int remaining = length;
    for (int filters : {16, 32}) {
        if (remaining < 6) break; // conv k=5 plus pooling room
        spec.conv_blocks.push_back({filters, 5, true});
        remaining = (remaining - 4) / 2;
    }
    return spec;
}

} // namespace datalens::model
