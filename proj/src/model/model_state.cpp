#include "datalens/model/model_state.hpp"

#include <cmath>
#include <fstream>

#include "datalens/common/error.hpp"
#include "datalens/common/rng.hpp"
#include "json.hpp"

namespace datalens::model {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "datalens-model";
constexpr int kVersion = 1;

json arch_to_json(const ArchitectureSpec& spec) {
    json blocks = json::array();
    for (const ConvBlockSpec& b : spec.conv_blocks)
        blocks.push_back({{"filters", b.filters},
                          {"kernel_size", b.kernel_size},
                          {"pool", b.pool}});
    return {{"input_channels", spec.input_channels},
            {"input_length", spec.input_length},
            {"conv_blocks", blocks},
            {"dense_units", spec.dense_units},
            {"num_classes", spec.num_classes}};
}

ArchitectureSpec arch_from_json(const json& j) {
    ArchitectureSpec spec;
    try {
        spec.input_channels = j.at("input_channels").get<int>();
        spec.input_length = j.at("input_length").get<int>();
        spec.dense_units = j.at("dense_units").get<int>();
        spec.num_classes = j.at("num_classes").get<int>();
        for (const json& b : j.at("conv_blocks")) {
            ConvBlockSpec blk;
            blk.filters = b.at("filters").get<int>();
            blk.kernel_size = b.at("kernel_size").get<int>();
            blk.pool = b.at("pool").get<bool>();
            spec.conv_blocks.push_back(blk);
        }
    } catch (const json::exception& e) {
        fail(Error::Kind::parse, std::string("bad architecture block: ") + e.what());
    }
    return spec;
}

} // namespace

std::string model_format_name() { return kFormat; }

ModelState init_model(const ArchitectureSpec& spec, std::uint64_t seed) {
    ModelState m;
    m.arch = spec;
    m.layout = make_layout(spec);
    m.params.values.assign(m.layout.total_params, 0.0);
    m.params.segments = m.layout.segments;

    Rng rng(seed);
    auto fill = [&](std::size_t offset, std::size_t count, int fan_in) {
        const double bound = std::sqrt(1.0 / fan_in);
        for (std::size_t i = 0; i < count; ++i)
            m.params.values[offset + i] = uniform(rng, -bound, bound);
    };

    for (std::size_t b = 0; b < spec.conv_blocks.size(); ++b) {
        const ConvBlockSpec& blk = spec.conv_blocks[b];
        const BlockShape& sh = m.layout.blocks[b];
        const int fan_in = sh.in_channels * blk.kernel_size;
        const std::size_t wn =
            static_cast<std::size_t>(blk.filters) * sh.in_channels * blk.kernel_size;
        fill(m.layout.conv[b].weight, wn, fan_in);
        fill(m.layout.conv[b].bias, static_cast<std::size_t>(blk.filters), fan_in);
    }
    if (spec.dense_units > 0) {
        const std::size_t wn =
            static_cast<std::size_t>(spec.dense_units) * m.layout.flatten_size;
        fill(m.layout.hidden_weight, wn, m.layout.flatten_size);
        fill(m.layout.hidden_bias, static_cast<std::size_t>(spec.dense_units),
             m.layout.flatten_size);
    }
    const std::size_t own =
        static_cast<std::size_t>(spec.num_classes) * m.layout.feature_dim;
    fill(m.layout.output_weight, own, m.layout.feature_dim);
    fill(m.layout.output_bias, static_cast<std::size_t>(spec.num_classes),
         m.layout.feature_dim);

    m.params.validate();
    return m;
}

void save_model(const ModelState& model, const std::string& path) {
    json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["architecture"] = arch_to_json(model.arch);
    j["feature_dim"] = model.layout.feature_dim;
    j["params"] = model.params.values;

    std::ofstream out(path, std::ios::binary);
    require(out.good(), Error::Kind::missing_artifact, "cannot open " + path + " for write");
    out << j.dump(2) << '\n';
    require(out.good(), Error::Kind::internal, "short write to " + path);
}

ModelState load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), Error::Kind::missing_artifact, "cannot open model file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(Error::Kind::parse, path + ": " + e.what());
    }

    require(j.value("format", std::string()) == kFormat, Error::Kind::version_mismatch,
            path + ": not a " + std::string(kFormat) + " file");
    require(j.value("version", -1) == kVersion, Error::Kind::version_mismatch,
            path + ": unsupported model version");

    ModelState m;
    m.arch = arch_from_json(j.at("architecture"));
    m.layout = make_layout(m.arch);
    try {
        m.params.values = j.at("params").get<std::vector<double>>();
    } catch (const json::exception& e) {
        fail(Error::Kind::parse, path + ": bad params array: " + e.what());
    }
    require(m.params.values.size() == static_cast<std::size_t>(m.layout.total_params),
            Error::Kind::parse,
            path + ": params length does not match the architecture");
    const int stored_dim = j.value("feature_dim", -1);
    require(stored_dim == m.layout.feature_dim, Error::Kind::parse,
            path + ": feature_dim does not match the architecture");
    m.params.segments = m.layout.segments;
    m.params.validate();
    return m;
}

} // namespace datalens::model
