#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "datalens/common/error.hpp"

namespace datalens::io {

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(Error::Kind::missing_artifact, "cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        fail(Error::Kind::parse, path.string() + ": " + e.what());
    }
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) fail(Error::Kind::internal, "cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) fail(Error::Kind::internal, "short write to " + path.string());
}

} // namespace datalens::io
