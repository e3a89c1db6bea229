#include "datalens/io/bundle.hpp"

#include <algorithm>
#include <fstream>

#include "datalens/common/error.hpp"
#include "datalens/common/text.hpp"
#include "datalens/data/delimited.hpp"
#include "datalens/io/json_file.hpp"

namespace datalens::io {
namespace {

constexpr const char* kBundleFormat = "datalens-bundle";
constexpr int kBundleVersion = 1;

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(Error::Kind::missing_artifact, "cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

} // namespace

void write_bundle(const data::TimeSeriesDataset& ds, const std::filesystem::path& dir) {
    ds.validate();
    std::filesystem::create_directories(dir);

    data::save_delimited(ds, (dir / "data.csv").string(), /*header=*/true);

    {
        std::ofstream out(dir / "truth.csv");
        if (!out) fail(Error::Kind::internal, "cannot write " + (dir / "truth.csv").string());
        out << "index,true_label,observed_label,flipped,split\n";
        for (std::size_t i = 0; i < ds.size(); ++i) {
            out << i << ',' << ds.true_labels[i] << ',' << ds.observed_labels[i] << ','
                << int(ds.flip_mask[i]) << ',' << data::split_name(ds.split[i]) << '\n';
        }
        if (!out) fail(Error::Kind::internal, "short write to " + (dir / "truth.csv").string());
    }

    nlohmann::json manifest{
        {"format", kBundleFormat},
        {"version", kBundleVersion},
        {"channels", ds.channels},
        {"length", ds.length},
        {"num_classes", ds.num_classes},
        {"counts",
         {{"train", ds.count(data::Split::train)},
          {"validation", ds.count(data::Split::validation)},
          {"test", ds.count(data::Split::test)}}},
        {"flipped", std::count(ds.flip_mask.begin(), ds.flip_mask.end(), std::uint8_t{1})},
        {"fingerprint", hex64(ds.fingerprint())},
    };
    write_json_file(dir / "manifest.json", manifest);
}

data::TimeSeriesDataset read_bundle(const std::filesystem::path& dir) {
    const auto mpath = dir / "manifest.json";
    const nlohmann::json manifest = read_json_file(mpath);

    require(manifest.value("format", "") == kBundleFormat, Error::Kind::version_mismatch,
            mpath.string() + ": not a dataset bundle manifest");
    require(manifest.value("version", -1) == kBundleVersion, Error::Kind::version_mismatch,
            mpath.string() + ": unsupported bundle version");

    data::DelimitedSchema schema;
    schema.channels = manifest.at("channels").get<int>();
    schema.length = manifest.at("length").get<int>();
    schema.has_header = true;
    const int num_classes = manifest.at("num_classes").get<int>();
    for (int c = 0; c < num_classes; ++c) schema.closed_labels.push_back(c);
    const auto& counts = manifest.at("counts");
    schema.n_train = counts.at("train").get<long long>();
    schema.n_val = counts.at("validation").get<long long>();
    schema.n_test = counts.at("test").get<long long>();

    auto ds = data::load_delimited((dir / "data.csv").string(), schema);

    const auto tpath = dir / "truth.csv";
    const auto lines = read_lines(tpath);
    require(!lines.empty() && lines.front() == "index,true_label,observed_label,flipped,split",
            Error::Kind::parse, tpath.string() + ": missing or malformed header");
    require(lines.size() == ds.size() + 1, Error::Kind::parse,
            tpath.string() + ": expected " + std::to_string(ds.size()) + " rows, got " +
                std::to_string(lines.size() - 1));
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const std::string where = tpath.string() + ":" + std::to_string(i + 2);
        const auto fields = split(lines[i + 1], ',');
        require(fields.size() == 5, Error::Kind::parse,
                where + ": expected 5 fields, got " + std::to_string(fields.size()));
        require(parse_int(fields[0], where) == static_cast<long long>(i), Error::Kind::parse,
                where + ": rows must be in index order");
        const long long truth = parse_int(fields[1], where);
        require(truth >= 0 && truth < num_classes, Error::Kind::parse,
                where + ": true label out of range");
        require(parse_int(fields[2], where) == ds.observed_labels[i], Error::Kind::parse,
                where + ": observed label disagrees with data.csv");
        const long long flipped = parse_int(fields[3], where);
        require(flipped == 0 || flipped == 1, Error::Kind::parse,
                where + ": flipped must be 0 or 1");
        require(std::string(fields[4]) == data::split_name(ds.split[i]), Error::Kind::parse,
                where + ": split disagrees with manifest counts");
        ds.true_labels[i] = static_cast<int>(truth);
        ds.flip_mask[i] = static_cast<std::uint8_t>(flipped);
    }

    ds.validate();
    const std::string expected = manifest.at("fingerprint").get<std::string>();
    require(hex64(ds.fingerprint()) == expected, Error::Kind::parse,
            dir.string() + ": bundle fingerprint mismatch (files were modified)");
    return ds;
}

} // namespace datalens::io
