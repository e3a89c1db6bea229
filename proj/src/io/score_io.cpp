#include "datalens/io/score_io.hpp"

#include <fstream>

#include "datalens/common/error.hpp"
#include "datalens/common/text.hpp"
#include "datalens/io/json_file.hpp"

namespace datalens::io {
namespace {

constexpr const char* kScoreFormat = "datalens-scores";
constexpr int kScoreVersion = 1;

std::filesystem::path sidecar(const std::filesystem::path& path) {
    return path.string() + ".meta.json";
}

} // namespace

void save_scores(const scoring::ScoreVector& scores, const std::filesystem::path& path) {
    scores.validate(scores.values.size());
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());

    std::ofstream out(path);
    if (!out) fail(Error::Kind::internal, "cannot write " + path.string());
    out << "sample_index,score\n";
    for (std::size_t i = 0; i < scores.values.size(); ++i)
        out << i << ',' << format_double(scores.values[i]) << '\n';
    if (!out) fail(Error::Kind::internal, "short write to " + path.string());

    write_json_file(sidecar(path), nlohmann::json{
                                       {"format", kScoreFormat},
                                       {"version", kScoreVersion},
                                       {"method", scores.method},
                                       {"classwise", scores.classwise},
                                       {"direction_semantics", scores.direction_semantics},
                                       {"count", scores.values.size()},
                                       {"meta", scores.meta},
                                   });
}

scoring::ScoreVector load_scores(const std::filesystem::path& path) {
    const nlohmann::json meta = read_json_file(sidecar(path));
    require(meta.value("format", "") == kScoreFormat, Error::Kind::version_mismatch,
            sidecar(path).string() + ": not a score sidecar");
    require(meta.value("version", -1) == kScoreVersion, Error::Kind::version_mismatch,
            sidecar(path).string() + ": unsupported score format version");

    scoring::ScoreVector sv;
    sv.method = meta.at("method").get<std::string>();
    sv.classwise = meta.at("classwise").get<bool>();
    sv.direction_semantics = meta.at("direction_semantics").get<std::string>();
    sv.meta = meta.at("meta");
    const auto count = meta.at("count").get<std::size_t>();

    std::ifstream in(path);
    if (!in) fail(Error::Kind::missing_artifact, "cannot open " + path.string());
    std::string line;
    std::size_t lineno = 0;
    require(static_cast<bool>(std::getline(in, line)), Error::Kind::parse,
            path.string() + ": empty file");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    require(line == "sample_index,score", Error::Kind::parse,
            path.string() + ":1: expected header \"sample_index,score\"");
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(lineno);
        const auto fields = split(line, ',');
        require(fields.size() == 2, Error::Kind::parse,
                where + ": expected 2 fields, got " + std::to_string(fields.size()));
        require(parse_int(fields[0], where) == static_cast<long long>(sv.values.size()),
                Error::Kind::parse, where + ": rows must be in index order");
        sv.values.push_back(parse_double(fields[1], where));
    }
    require(sv.values.size() == count, Error::Kind::parse,
            path.string() + ": expected " + std::to_string(count) + " scores, got " +
                std::to_string(sv.values.size()));
    sv.validate(sv.values.size());
    return sv;
}

} // namespace datalens::io
