#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace datalens::io {

inline constexpr const char* kToolName = "datalens";
inline constexpr const char* kToolVersion = "0.1.0";

// content hash of a file's bytes
std::uint64_t file_fingerprint(const std::filesystem::path& path);

// Registry of everything a run read and wrote, plus the resolved config and
// its hash. Paths are stored relative to a base directory so reruns into
// different trees produce identical manifests. Stage timings are the one
// non-deterministic field; rerun comparisons must ignore "timings" and any
// output marked volatile.
class RunManifest {
public:
    RunManifest(std::string command, nlohmann::json config, std::filesystem::path base_dir);

    void add_input(const std::filesystem::path& file);
    void add_output(const std::filesystem::path& file);
    // registered without a fingerprint; content varies run to run (wall time)
    void add_volatile_output(const std::filesystem::path& file);
    void set_timing(const std::string& stage, double seconds);

    nlohmann::json to_json() const;
    void write(const std::filesystem::path& path) const;

private:
    struct FileRecord {
        std::string path;
        std::string fingerprint; // empty = volatile
    };

    std::string relative(const std::filesystem::path& file) const;

    std::string command_;
    nlohmann::json config_;
    std::filesystem::path base_;
    std::vector<FileRecord> inputs_;
    std::vector<FileRecord> outputs_;
    nlohmann::json timings_ = nlohmann::json::object();
};

} // namespace datalens::io
