#include "datalens/io/report_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "datalens/common/error.hpp"
#include "datalens/common/text.hpp"
#include "datalens/io/bundle.hpp"
#include "datalens/io/json_file.hpp"
#include "datalens/io/score_io.hpp"
#include "datalens/io/svg.hpp"

namespace datalens::io {
namespace {

namespace fs = std::filesystem;
using harness::RatePoint;

class Writer {
public:
    Writer(fs::path out_dir, RunManifest& manifest)
        : out_(std::move(out_dir)), manifest_(manifest) {}

    fs::path path(const std::string& rel) const { return out_ / rel; }

    void csv(const std::string& rel, const std::string& content, bool is_volatile = false) {
        const fs::path p = path(rel);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        std::ofstream out(p);
        if (!out) fail(Error::Kind::internal, "cannot write " + p.string());
        out << content;
        if (!out) fail(Error::Kind::internal, "short write to " + p.string());
        out.close();
        if (is_volatile)
            manifest_.add_volatile_output(p);
        else
            manifest_.add_output(p);
    }

    void json_out(const std::string& rel, const nlohmann::json& j) {
        const fs::path p = path(rel);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        write_json_file(p, j);
        manifest_.add_output(p);
    }

    void mark(const std::string& rel) { manifest_.add_output(path(rel)); }

private:
    fs::path out_;
    RunManifest& manifest_;
};

// detection-table row order; unknown names sort after, in appearance order
const std::vector<std::string>& canonical_columns() {
    static const std::vector<std::string> order = {
        "classwise_low",   "classwise_high",   "classwise_absolute", "low",  "high",
        "absolute",        "representer_low",  "representer_high",   "loss", "random"};
    return order;
}

std::size_t canonical_rank(const std::string& name) {
    const auto& order = canonical_columns();
    for (std::size_t i = 0; i < order.size(); ++i)
        if (order[i] == name) return i;
    return order.size();
}

std::vector<std::string> distinct_columns(std::span<const RatePoint> rows, bool canonical) {
    std::vector<std::string> out;
    for (const auto& r : rows)
        if (std::find(out.begin(), out.end(), r.column) == out.end()) out.push_back(r.column);
    if (canonical)
        std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
            return canonical_rank(a) < canonical_rank(b);
        });
    return out;
}

std::vector<double> distinct_ratios(std::span<const RatePoint> rows) {
    std::vector<double> out;
    for (const auto& r : rows)
        if (std::find(out.begin(), out.end(), r.ratio) == out.end()) out.push_back(r.ratio);
    return out;
}

std::string long_table(std::span<const RatePoint> rows, const std::string& key_header) {
    std::string s = key_header + ",seed,ratio,rate\n";
    for (const auto& r : rows)
        s += r.column + "," + std::to_string(r.seed) + "," + format_double(r.ratio) + "," +
             format_double(r.rate) + "\n";
    return s;
}

std::string summary_table(std::span<const RatePoint> rows, const std::string& key_header,
                          bool canonical) {
    const auto columns = distinct_columns(rows, canonical);
    const auto ratios = distinct_ratios(rows);
    std::string s = key_header;
    for (double r : ratios) s += "," + format_double(r);
    s += "\n";
    for (const auto& col : columns) {
        s += col;
        for (double ratio : ratios) {
            double sum = 0.0;
            std::size_t n = 0;
            for (const auto& row : rows)
                if (row.column == col && row.ratio == ratio) {
                    sum += row.rate;
                    ++n;
                }
            s += ",";
            if (n) s += format_double(sum / static_cast<double>(n));
        }
        s += "\n";
    }
    return s;
}

void write_curve_plot(Writer& w, const harness::ExperimentReport& rep) {
    SvgChart chart;
    chart.title = "inspection curves (mean over seeds)";
    chart.x_label = "fraction of training set inspected";
    chart.y_label = "fraction of flipped labels found";
    chart.x_min = 0.0;
    chart.x_max = 1.0;
    chart.y_min = 0.0;
    chart.y_max = 1.0;

    for (const auto& col : distinct_columns(rep.curves, /*canonical=*/true)) {
        SvgSeries sr;
        sr.label = col;
        for (double ratio : distinct_ratios(rep.curves)) {
            double sum = 0.0;
            std::size_t n = 0;
            for (const auto& row : rep.curves)
                if (row.column == col && row.ratio == ratio) {
                    sum += row.rate;
                    ++n;
                }
            if (n) {
                sr.x.push_back(ratio);
                sr.y.push_back(sum / static_cast<double>(n));
            }
        }
        chart.series.push_back(std::move(sr));
    }
    SvgSeries diag;
    diag.label = "uniform reference";
    diag.x = {0.0, 1.0};
    diag.y = {0.0, 1.0};
    diag.dashed = true;
    chart.series.push_back(std::move(diag));

    write_line_chart(chart, w.path("plots/curves.svg"));
    w.mark("plots/curves.svg");
}

std::string repeat_rows(const std::string& name, const harness::ExperimentOutcome& o) {
    std::string s;
    for (std::size_t r = 0; r < o.treated.accuracies.size(); ++r)
        s += name + "," + std::to_string(r) + "," + format_double(o.treated.accuracies[r]) + "," +
             format_double(o.baseline.accuracies[r]) + "\n";
    return s;
}

std::string summary_row(const std::string& name, const std::string& column, double ratio,
                        const harness::ExperimentOutcome& o) {
    return name + "," + column + "," + format_double(ratio) + "," + std::to_string(o.inspected) +
           "," + std::to_string(o.affected) + "," + format_double(o.treated.mean) + "," +
           format_double(o.treated.stddev) + "," + format_double(o.baseline.mean) + "," +
           format_double(o.baseline.stddev) + "\n";
}

void render_derived_views(Writer& w, const harness::ExperimentReport& rep) {
    if (!rep.detection.empty())
        w.csv("detection_summary.csv",
              summary_table(rep.detection, "column", /*canonical=*/true));
    if (!rep.combinations.empty())
        w.csv("combination_summary.csv",
              summary_table(rep.combinations, "name", /*canonical=*/false));
    if (!rep.curves.empty()) write_curve_plot(w, rep);
}

} // namespace

void write_rendered_tables(const harness::ExperimentReport& rep, const fs::path& out_dir,
                           RunManifest& manifest) {
    fs::create_directories(out_dir);
    Writer w(out_dir, manifest);
    render_derived_views(w, rep);
}

void write_report(const harness::ExperimentReport& rep, const fs::path& out_dir,
                  RunManifest& manifest) {
    fs::create_directories(out_dir);
    Writer w(out_dir, manifest);

    w.json_out("run_config.json", rep.resolved_config);

    {
        std::string s = "seed,val_accuracy,test_accuracy\n";
        for (const auto& art : rep.per_seed)
            s += std::to_string(art.seed) + "," + format_double(art.val_accuracy) + "," +
                 format_double(art.test_accuracy) + "\n";
        w.csv("accuracy.csv", s);
    }

    if (!rep.detection.empty()) w.csv("detection.csv", long_table(rep.detection, "column"));
    if (!rep.combinations.empty())
        w.csv("combinations.csv", long_table(rep.combinations, "name"));
    if (!rep.curves.empty()) w.csv("curves.csv", long_table(rep.curves, "column"));
    render_derived_views(w, rep);

    for (const auto& [method, sv] : rep.per_seed.front().scores) {
        const std::string rel = "plots/score_distribution_" + method + ".svg";
        write_histogram(method + " scores (seed " + std::to_string(rep.per_seed.front().seed) +
                            ")",
                        "score", sv.values, 40, w.path(rel));
        w.mark(rel);
    }

    if (rep.has_diff) {
        std::string s = "sample_index";
        for (const auto& m : rep.diff.methods) s += "," + m;
        s += "\n";
        const std::size_t cols = rep.diff.methods.size();
        for (std::size_t i = 0; i < rep.diff.flip_indices.size(); ++i) {
            s += std::to_string(rep.diff.flip_indices[i]);
            for (std::size_t j = 0; j < cols; ++j)
                s += "," + std::to_string(int(rep.diff.detected[i * cols + j]));
            s += "\n";
        }
        w.csv("diff.csv", s);
    }

    if (rep.has_correction || rep.has_deletion) {
        std::string rows = "experiment,repeat,treated_accuracy,baseline_accuracy\n";
        std::string summary =
            "experiment,column,ratio,inspected,affected,treated_mean,treated_stddev,"
            "baseline_mean,baseline_stddev\n";
        if (rep.has_correction) {
            rows += repeat_rows("correction", rep.correction);
            summary += summary_row("correction", rep.correction_column, rep.correction_ratio,
                                   rep.correction);
        }
        if (rep.has_deletion) {
            rows += repeat_rows("deletion", rep.deletion);
            summary +=
                summary_row("deletion", rep.deletion_column, rep.deletion_ratio, rep.deletion);
        }
        w.csv("retrain.csv", rows);
        w.csv("retrain_summary.csv", summary);
    }

    if (rep.has_timing) {
        std::string s = "method,seconds\n";
        nlohmann::json settings = nlohmann::json::object();
        for (const auto& t : rep.timings) {
            s += t.method + "," + format_double(t.seconds) + "\n";
            settings[t.method] = t.settings;
        }
        w.csv("timing.csv", s, /*is_volatile=*/true);
        w.json_out("timing_settings.json", settings);
    }

    // always present so reruns compare a fixed artifact set
    std::string warn_text;
    for (const auto& msg : rep.warnings) warn_text += msg + "\n";
    w.csv("warnings.txt", warn_text);

    for (const auto& art : rep.per_seed) {
        const std::string seed_dir = "scores/seed" + std::to_string(art.seed) + "/";
        auto dump = [&](const std::string& name, const scoring::ScoreVector& sv) {
            const std::string rel = seed_dir + name + ".csv";
            save_scores(sv, w.path(rel));
            w.mark(rel);
            w.mark(rel + ".meta.json");
        };
        for (const auto& [method, sv] : art.scores) dump(method, sv);
        for (const auto& [name, sv] : art.combined) dump("combined_" + name, sv);

        const std::string model_rel = "models/seed" + std::to_string(art.seed) + ".json";
        fs::create_directories(w.path("models"));
        model::save_model(art.model, w.path(model_rel).string());
        w.mark(model_rel);
    }

    write_bundle(rep.dataset, w.path("dataset"));
    w.mark("dataset/data.csv");
    w.mark("dataset/truth.csv");
    w.mark("dataset/manifest.json");
}

} // namespace datalens::io
