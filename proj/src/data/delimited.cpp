#include "datalens/data/delimited.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "datalens/common/error.hpp"
#include "datalens/common/text.hpp"

namespace datalens::data {

TimeSeriesDataset load_delimited(const std::string& path, const DelimitedSchema& schema) {
    require(schema.channels >= 1 && schema.length >= 1, Error::Kind::config,
            "delimited schema: channels/length must be positive");
    require(schema.n_train >= 0 && schema.n_val >= 0, Error::Kind::config,
            "delimited schema: split sizes must be non-negative (n_test may be -1)");

    std::ifstream in(path, std::ios::binary);
    require(in.good(), Error::Kind::missing_artifact, "cannot open " + path);

    const std::size_t fields_per_row =
        1 + static_cast<std::size_t>(schema.channels) * schema.length;

    std::vector<long long> sorted_closed = schema.closed_labels;
    std::sort(sorted_closed.begin(), sorted_closed.end());
    sorted_closed.erase(std::unique(sorted_closed.begin(), sorted_closed.end()),
                        sorted_closed.end());

    std::vector<long long> raw_labels;
    std::vector<double> values;
    std::string line;
    long long line_no = 0;
    bool skipped_header = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (schema.has_header && !skipped_header) {
            skipped_header = true;
            continue;
        }
        if (line.empty()) continue;

        const auto fields = split(line, schema.delimiter);
        require(fields.size() == fields_per_row, Error::Kind::parse,
                path + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(fields_per_row) + " fields, got " +
                    std::to_string(fields.size()));

        const std::string where = "at " + path + ":" + std::to_string(line_no);
        raw_labels.push_back(parse_int(fields[0], where));
        require(sorted_closed.empty() ||
                    std::binary_search(sorted_closed.begin(), sorted_closed.end(),
                                       raw_labels.back()),
                Error::Kind::parse,
                path + ":" + std::to_string(line_no) + ": label " +
                    std::to_string(raw_labels.back()) +
                    " is outside the declared label set");
        for (std::size_t f = 1; f < fields.size(); ++f)
            values.push_back(parse_double(fields[f], where));
    }
    require(!raw_labels.empty(), Error::Kind::parse, path + ": no samples");

    // dense re-index: distinct raw labels sorted ascending -> 0..k-1
    std::map<long long, int> label_map;
    if (!sorted_closed.empty()) {
        for (std::size_t i = 0; i < sorted_closed.size(); ++i)
            label_map[sorted_closed[i]] = static_cast<int>(i);
    } else {
        for (long long raw : raw_labels) label_map.emplace(raw, 0);
        int next = 0;
        for (auto& [raw, dense] : label_map) dense = next++;
    }

    const std::size_t n = raw_labels.size();
    TimeSeriesDataset ds;
    ds.channels = schema.channels;
    ds.length = schema.length;
    ds.num_classes = static_cast<int>(label_map.size());
    ds.values = std::move(values);
    ds.true_labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto it = label_map.find(raw_labels[i]);
        require(it != label_map.end(), Error::Kind::parse,
                path + ": label " + std::to_string(raw_labels[i]) + " at sample " +
                    std::to_string(i) + " is outside the declared label set");
        ds.true_labels.push_back(it->second);
    }
    ds.observed_labels = ds.true_labels;
    ds.flip_mask.assign(n, 0);

    const long long n_test =
        schema.n_test >= 0
            ? schema.n_test
            : static_cast<long long>(n) - schema.n_train - schema.n_val;
    require(n_test >= 0 &&
                schema.n_train + schema.n_val + n_test == static_cast<long long>(n),
            Error::Kind::config,
            path + ": schema split sizes " + std::to_string(schema.n_train) + "/" +
                std::to_string(schema.n_val) + "/" + std::to_string(n_test) +
                " do not add up to " + std::to_string(n) + " rows");
    ds.split.reserve(n);
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        ds.split.push_back(i < schema.n_train             ? Split::train
                           : i < schema.n_train + schema.n_val ? Split::validation
                                                               : Split::test);

    ds.validate();
    return ds;
}

void save_delimited(const TimeSeriesDataset& ds, const std::string& path, bool header,
                    char delimiter) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), Error::Kind::missing_artifact, "cannot open " + path + " for write");

    if (header) {
        out << "label";
        for (int c = 0; c < ds.channels; ++c)
            for (int t = 0; t < ds.length; ++t)
                out << delimiter << 'c' << c << "_t" << t;
        out << '\n';
    }
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out << ds.observed_labels[i];
        const auto s = ds.sample(i);
        for (double v : s) out << delimiter << format_double(v);
        out << '\n';
    }
    require(out.good(), Error::Kind::internal, "short write to " + path);
}

} // namespace datalens::data
