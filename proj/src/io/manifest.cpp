#include "datalens/io/manifest.hpp"

#include <algorithm>
#include <fstream>

#include "datalens/common/error.hpp"
#include "datalens/common/text.hpp"
#include "datalens/io/json_file.hpp"

namespace datalens::io {

std::uint64_t file_fingerprint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Error::Kind::missing_artifact, "cannot open " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
    return h;
}

RunManifest::RunManifest(std::string command, nlohmann::json config,
                         std::filesystem::path base_dir)
    : command_(std::move(command)), config_(std::move(config)), base_(std::move(base_dir)) {}

std::string RunManifest::relative(const std::filesystem::path& file) const {
    std::error_code ec;
    auto rel = std::filesystem::relative(file, base_, ec);
    if (ec || rel.empty()) rel = file;
    return rel.generic_string();
}

void RunManifest::add_input(const std::filesystem::path& file) {
    inputs_.push_back({relative(file), hex64(file_fingerprint(file))});
}

void RunManifest::add_output(const std::filesystem::path& file) {
    outputs_.push_back({relative(file), hex64(file_fingerprint(file))});
}

void RunManifest::add_volatile_output(const std::filesystem::path& file) {
    require(std::filesystem::exists(file), Error::Kind::missing_artifact,
            "cannot register missing file " + file.string());
    outputs_.push_back({relative(file), ""});
}

void RunManifest::set_timing(const std::string& stage, double seconds) {
    timings_[stage] = seconds;
}

nlohmann::json RunManifest::to_json() const {
    auto records = [](std::vector<FileRecord> files) {
        std::sort(files.begin(), files.end(),
                  [](const FileRecord& a, const FileRecord& b) { return a.path < b.path; });
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& f : files) {
            nlohmann::json rec{{"path", f.path}};
            if (f.fingerprint.empty())
                rec["volatile"] = true;
            else
                rec["fingerprint"] = f.fingerprint;
            arr.push_back(std::move(rec));
        }
        return arr;
    };
    return nlohmann::json{
        {"format", "datalens-run"},
        {"version", 1},
        {"tool", kToolName},
        {"tool_version", kToolVersion},
        {"command", command_},
        {"config", config_},
        {"config_hash", hex64(fnv1a64(config_.dump()))},
        {"inputs", records(inputs_)},
        {"outputs", records(outputs_)},
        {"timings", timings_},
    };
}

void RunManifest::write(const std::filesystem::path& path) const {
    write_json_file(path, to_json());
}

} // namespace datalens::io
