#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "datalens/common/error.hpp"
#include "datalens/data/flip.hpp"
#include "datalens/data/generate.hpp"
#include "datalens/harness/grid.hpp"
#include "datalens/io/bundle.hpp"
#include "datalens/io/json_file.hpp"
#include "datalens/io/manifest.hpp"
#include "datalens/io/report_io.hpp"
#include "datalens/io/score_io.hpp"
#include "datalens/io/svg.hpp"

using namespace datalens;
namespace fs = std::filesystem;

namespace {

fs::path work_root() {
    static const fs::path root = [] {
        const fs::path p = fs::temp_directory_path() / "datalens_io_cli_tests";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return root;
}

fs::path fresh_dir(const char* name) {
    const fs::path p = work_root() / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CliResult {
    int exit_code = -1;
    std::string err;
};

CliResult cli(const std::string& args) {
    static int counter = 0;
    const fs::path err_file = work_root() / ("stderr_" + std::to_string(counter++) + ".txt");
    const std::string cmd = std::string(DATALENS_CLI_PATH) + " " + args + " >/dev/null 2>" +
                            err_file.string();
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    if (fs::exists(err_file)) r.err = slurp(err_file);
    return r;
}

// the error channel carries exactly one JSON line on failure
nlohmann::json error_line(const CliResult& r) {
    REQUIRE(!r.err.empty());
    const auto nl = r.err.find('\n');
    REQUIRE(nl == r.err.size() - 1);
    return nlohmann::json::parse(r.err.substr(0, nl));
}

data::TimeSeriesDataset flipped_tiny() {
    const auto clean = data::generate_anomaly_dataset(30, 10, 10, 12, 1, 5);
    return data::flip_labels(clean, {0.2, 3, data::FlipMode::binary_complement});
}

} // namespace

TEST_CASE("bundles round-trip exactly and detect tampering") {
    const auto ds = flipped_tiny();
    const auto dir = fresh_dir("bundle_roundtrip");
    io::write_bundle(ds, dir);
    CHECK(fs::exists(dir / "data.csv"));
    CHECK(fs::exists(dir / "truth.csv"));
    CHECK(fs::exists(dir / "manifest.json"));

    const auto back = io::read_bundle(dir);
    CHECK(back.values == ds.values);
    CHECK(back.true_labels == ds.true_labels);
    CHECK(back.observed_labels == ds.observed_labels);
    CHECK(back.flip_mask == ds.flip_mask);
    CHECK(back.split == ds.split);
    CHECK(back.fingerprint() == ds.fingerprint());

    SUBCASE("a modified file fails the fingerprint check") {
        // perturb one digit of one series value; only the fingerprint can
        // notice (labels are cross-checked against truth.csv separately)
        auto text = slurp(dir / "data.csv");
        const auto pos = text.find('.') + 1;
        text[pos] = text[pos] == '1' ? '2' : '1';
        std::ofstream(dir / "data.csv", std::ios::binary) << text;
        try {
            io::read_bundle(dir);
            FAIL("expected fingerprint mismatch");
        } catch (const Error& e) {
            CHECK(e.kind() == Error::Kind::parse);
            CHECK(std::string(e.what()).find("fingerprint") != std::string::npos);
        }
    }
    SUBCASE("a missing piece is a missing artifact") {
        fs::remove(dir / "truth.csv");
        try {
            io::read_bundle(dir);
            FAIL("expected missing artifact");
        } catch (const Error& e) {
            CHECK(e.kind() == Error::Kind::missing_artifact);
        }
    }
}

TEST_CASE("score files round-trip bit-exactly with their sidecar") {
    scoring::ScoreVector sv;
    sv.method = "influence";
    sv.classwise = true;
    sv.direction_semantics = "negative = harmful, positive = helpful";
    sv.values = {0.1, -0.0, 1e-300, 0.30000000000000004, -3.141592653589793, 42.0};
    sv.meta = {{"solver", "cg"}, {"iterations", 27}};

    const auto dir = fresh_dir("scores");
    const auto path = dir / "scores.csv";
    io::save_scores(sv, path);
    CHECK(fs::exists(dir / "scores.csv.meta.json"));

    const auto back = io::load_scores(path);
    CHECK(back.values == sv.values);
    CHECK(std::signbit(back.values[1]));
    CHECK(back.method == "influence");
    CHECK(back.classwise);
    CHECK(back.direction_semantics == sv.direction_semantics);
    CHECK(back.meta["iterations"].get<int>() == 27);

    SUBCASE("the sidecar is required") {
        fs::remove(dir / "scores.csv.meta.json");
        CHECK_THROWS_AS(io::load_scores(path), Error);
    }
    SUBCASE("index gaps are parse errors") {
        std::ofstream(path) << "sample_index,score\n0,1.0\n2,2.0\n";
        try {
            io::load_scores(path);
            FAIL("expected parse error");
        } catch (const Error& e) {
            CHECK(e.kind() == Error::Kind::parse);
        }
    }
    SUBCASE("a count mismatch against the sidecar is rejected") {
        std::ofstream(path) << "sample_index,score\n0,1.0\n";
        CHECK_THROWS_AS(io::load_scores(path), Error);
    }
}

TEST_CASE("run manifests relativize paths and mark volatile outputs") {
    const auto dir = fresh_dir("manifest");
    std::ofstream(dir / "in.txt") << "input\n";
    std::ofstream(dir / "out.txt") << "output\n";
    fs::create_directories(dir / "sub");
    std::ofstream(dir / "sub" / "timing.csv") << "method,seconds\nloss,0.1\n";

    io::RunManifest man("score", {{"alpha", 1}}, dir);
    man.add_input(dir / "in.txt");
    man.add_output(dir / "out.txt");
    man.add_volatile_output(dir / "sub" / "timing.csv");
    man.set_timing("total", 1.5);
    man.write(dir / "run_manifest.json");

    const auto j = io::read_json_file(dir / "run_manifest.json");
    CHECK(j["format"] == "datalens-run");
    CHECK(j["tool"] == "datalens");
    CHECK(j["command"] == "score");
    CHECK(j["config_hash"].get<std::string>().size() == 16);
    CHECK(j["inputs"][0]["path"] == "in.txt");
    CHECK(j["inputs"][0]["fingerprint"].get<std::string>().size() == 16);
    CHECK(j["outputs"][0]["path"] == "out.txt");
    CHECK(j["outputs"][1]["path"] == "sub/timing.csv");
    CHECK(j["outputs"][1]["volatile"].get<bool>());
    CHECK(!j["outputs"][1].contains("fingerprint"));
    CHECK(j["timings"]["total"].get<double>() == 1.5);

    // registering a nonexistent output is an internal error
    CHECK_THROWS_AS(man.add_output(dir / "ghost.txt"), Error);
}

TEST_CASE("file fingerprints hash content, not names") {
    const auto dir = fresh_dir("fingerprints");
    std::ofstream(dir / "a.txt") << "same content";
    std::ofstream(dir / "b.txt") << "same content";
    std::ofstream(dir / "c.txt") << "other content";
    CHECK(io::file_fingerprint(dir / "a.txt") == io::file_fingerprint(dir / "b.txt"));
    CHECK(io::file_fingerprint(dir / "a.txt") != io::file_fingerprint(dir / "c.txt"));
    CHECK_THROWS_AS(io::file_fingerprint(dir / "nope.txt"), Error);
}

TEST_CASE("json helpers classify failures") {
    const auto dir = fresh_dir("json");
    try {
        io::read_json_file(dir / "absent.json");
        FAIL("expected missing artifact");
    } catch (const Error& e) {
        CHECK(e.kind() == Error::Kind::missing_artifact);
    }
    std::ofstream(dir / "bad.json") << "{not json";
    try {
        io::read_json_file(dir / "bad.json");
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.kind() == Error::Kind::parse);
    }
    io::write_json_file(dir / "ok.json", {{"k", "v"}});
    CHECK(io::read_json_file(dir / "ok.json")["k"] == "v");
}

TEST_CASE("svg rendering is deterministic and escapes markup") {
    io::SvgChart chart;
    chart.title = "rates <&> \"quoted\"";
    chart.x_label = "x";
    chart.y_label = "y";
    io::SvgSeries s;
    s.label = "a<b";
    s.x = {0.0, 0.5, 1.0};
    s.y = {0.1, 0.4, 0.9};
    chart.series.push_back(s);
    io::SvgSeries ref = s;
    ref.label = "reference";
    ref.dashed = true;
    chart.series.push_back(ref);

    const auto doc = io::render_line_chart(chart);
    CHECK(doc == io::render_line_chart(chart));
    CHECK(doc.find("<svg") != std::string::npos);
    CHECK(doc.find("rates &lt;&amp;&gt;") != std::string::npos);
    CHECK(doc.find("a&lt;b") != std::string::npos);
    CHECK(doc.find("<&>") == std::string::npos);
    CHECK(doc.find("stroke-dasharray") != std::string::npos);

    // writers create missing parent directories
    const auto dir = fresh_dir("svg");
    io::write_line_chart(chart, dir / "deep" / "nested" / "chart.svg");
    CHECK(slurp(dir / "deep" / "nested" / "chart.svg") == doc);

    const std::vector<double> vals{0.1, 0.2, 0.2, 0.9, 0.5};
    const auto hist = io::render_histogram("hist", "score", vals, 4);
    CHECK(hist == io::render_histogram("hist", "score", vals, 4));
    CHECK(hist.find("<rect") != std::string::npos);
    io::write_histogram("hist", "score", vals, 4, dir / "hist.svg");
    CHECK(fs::exists(dir / "hist.svg"));
}

TEST_CASE("report writing lays out the full artifact tree") {
    nlohmann::json j{
        {"dataset",
         {{"kind", "anomaly"},
          {"n_train", 30},
          {"n_val", 10},
          {"n_test", 10},
          {"length", 12},
          {"channels", 1},
          {"seed", 5}}},
        {"flip", {{"rate", 0.2}, {"seed", 3}}},
        {"train", {{"epochs", 3}, {"batch_size", 8}}},
        {"methods", {"loss", "random"}},
        {"ratios", {0.25, 0.5}},
        {"curve_ratios", {0.5, 1.0}},
        {"seeds", {0}},
        {"repeats", 2},
        {"combinations", {"loss+random"}},
        {"correction", {{"column", "loss"}, {"ratio", 0.5}}},
        {"timing", true},
    };
    const auto cfg = harness::parse_grid_config(j);
    const auto rep = harness::run_grid(cfg);

    const auto dir = fresh_dir("report");
    io::RunManifest man("evaluate", j, dir);
    io::write_report(rep, dir, man);
    man.write(dir / "run_manifest.json");

    for (const char* f :
         {"run_config.json", "accuracy.csv", "detection.csv", "detection_summary.csv",
          "combinations.csv", "combination_summary.csv", "curves.csv", "plots/curves.svg",
          "plots/score_distribution_loss.svg", "plots/score_distribution_random.svg",
          "retrain.csv", "retrain_summary.csv", "timing.csv", "timing_settings.json",
          "warnings.txt", "scores/seed0/loss.csv", "scores/seed0/random.csv",
          "scores/seed0/combined_loss+random.csv", "models/seed0.json",
          "dataset/manifest.json", "run_manifest.json"})
        CHECK_MESSAGE(fs::exists(dir / f), f);

    // summary rows follow the canonical column order
    const auto summary = slurp(dir / "detection_summary.csv");
    CHECK(summary.find("column,0.25,0.5\n") == 0);
    CHECK(summary.find("\nloss,") < summary.find("\nrandom,"));

    // the dataset artifact is reloadable and matches the in-memory copy
    CHECK(io::read_bundle(dir / "dataset").fingerprint() == rep.dataset.fingerprint());

    // accuracy rows carry one line per seed
    const auto acc = slurp(dir / "accuracy.csv");
    CHECK(acc.find("seed,val_accuracy,test_accuracy\n") == 0);

    // the manifest covers the tree; timing.csv is its only volatile output
    const auto man_json = io::read_json_file(dir / "run_manifest.json");
    std::size_t volatiles = 0;
    for (const auto& o : man_json["outputs"]) {
        if (o.contains("volatile")) {
            ++volatiles;
            CHECK(o["path"] == "timing.csv");
        }
    }
    CHECK(volatiles == 1);

    SUBCASE("re-rendering derived views reproduces them byte for byte") {
        const auto summary_before = slurp(dir / "detection_summary.csv");
        const auto svg_before = slurp(dir / "plots" / "curves.svg");
        const auto rr = fresh_dir("report_rr");
        io::RunManifest man2("report", j, rr);
        io::write_rendered_tables(rep, rr, man2);
        CHECK(slurp(rr / "detection_summary.csv") == summary_before);
        CHECK(slurp(rr / "plots" / "curves.svg") == svg_before);
    }
}

TEST_CASE("cli pipeline runs end to end") {
    const auto root = fresh_dir("cli");
    const auto bundle = (root / "bundle").string();
    const auto flipped = (root / "flipped").string();

    CHECK(cli("generate --out " + bundle +
              " --n-train 30 --n-val 10 --n-test 10 --length 12 --channels 1 --seed 5")
              .exit_code == 0);
    CHECK(fs::exists(root / "bundle" / "data.csv"));
    CHECK(fs::exists(root / "bundle" / "run_manifest.json"));

    CHECK(cli("flip --data " + bundle + " --out " + flipped + " --rate 0.2 --seed 3")
              .exit_code == 0);
    const auto ds = io::read_bundle(flipped);
    std::size_t flips = 0;
    for (auto m : ds.flip_mask) flips += m;
    CHECK(flips == 6);

    const auto train_cfg = root / "train.json";
    io::write_json_file(train_cfg, {{"epochs", 3}, {"batch_size", 8}});
    const auto run = (root / "run").string();
    CHECK(cli("train --data " + flipped + " --out " + run + " --config " +
              train_cfg.string() + " --seed 0")
              .exit_code == 0);
    CHECK(fs::exists(root / "run" / "model.json"));
    const auto hist = slurp(root / "run" / "history.csv");
    CHECK(hist.find("epoch,train_loss,train_accuracy,val_loss,val_accuracy\n") == 0);

    const auto sc_loss = (root / "sc_loss").string();
    CHECK(cli("score --data " + flipped + " --model " + run + "/model.json" +
              " --method loss --out " + sc_loss)
              .exit_code == 0);
    const auto loss_scores = io::load_scores(root / "sc_loss" / "scores.csv");
    CHECK(loss_scores.values.size() == 30);
    CHECK(loss_scores.method == "loss");

    const auto sc_rand = (root / "sc_rand").string();
    CHECK(cli("score --data " + flipped + " --model " + run + "/model.json" +
              " --method random --out " + sc_rand + " --seed 1")
              .exit_code == 0);

    const auto eval = (root / "eval").string();
    CHECK(cli("evaluate --data " + flipped + " --scores " + sc_loss +
              "/scores.csv --direction high_first --ratio 0.5 --out " + eval)
              .exit_code == 0);
    const auto eval_csv = slurp(root / "eval" / "evaluation.csv");
    CHECK(eval_csv.find("method,direction,ratio,inspected,detected,rate\n") == 0);
    CHECK(eval_csv.find("loss,high_first,0.5,15,") != std::string::npos);

    const auto comb = (root / "comb").string();
    CHECK(cli("combine --scores " + sc_loss + "/scores.csv --direction high_first" +
              " --scores " + sc_rand + "/scores.csv --direction high_first --out " + comb)
              .exit_code == 0);
    const auto combined = io::load_scores(root / "comb" / "scores.csv");
    CHECK(combined.method == "loss+random");
    CHECK(combined.values.size() == 30);
}

TEST_CASE("cli evaluate drives a config suite deterministically") {
    const auto root = fresh_dir("cli_suite");
    const nlohmann::json grid{
        {"dataset",
         {{"kind", "anomaly"},
          {"n_train", 30},
          {"n_val", 10},
          {"n_test", 10},
          {"length", 12},
          {"channels", 1},
          {"seed", 5}}},
        {"flip", {{"rate", 0.2}, {"seed", 3}}},
        {"train", {{"epochs", 3}, {"batch_size", 8}}},
        {"methods", {"loss", "random"}},
        {"ratios", {0.5}},
        {"curve_ratios", {0.5, 1.0}},
        {"seeds", {0}},
    };
    const auto cfg_path = root / "grid.json";
    io::write_json_file(cfg_path, grid);

    const auto rep1 = (root / "rep1").string();
    const auto rep2 = (root / "rep2").string();
    CHECK(cli("evaluate --config " + cfg_path.string() + " --out " + rep1).exit_code == 0);
    CHECK(cli("evaluate --config " + cfg_path.string() + " --out " + rep2).exit_code == 0);
    CHECK(slurp(root / "rep1" / "detection.csv") == slurp(root / "rep2" / "detection.csv"));
    CHECK(slurp(root / "rep1" / "scores" / "seed0" / "loss.csv") ==
          slurp(root / "rep2" / "scores" / "seed0" / "loss.csv"));
    CHECK(slurp(root / "rep1" / "models" / "seed0.json") ==
          slurp(root / "rep2" / "models" / "seed0.json"));

    // re-render from the finished run
    const auto rr = (root / "rr").string();
    CHECK(cli("report --from " + rep1 + " --out " + rr).exit_code == 0);
    CHECK(slurp(root / "rr" / "detection_summary.csv") ==
          slurp(root / "rep1" / "detection_summary.csv"));
    CHECK(slurp(root / "rr" / "plots" / "curves.svg") ==
          slurp(root / "rep1" / "plots" / "curves.svg"));
}

TEST_CASE("cli failures emit one json line on stderr") {
    const auto root = fresh_dir("cli_errors");

    // missing required option: CLI11 parse error
    auto r = cli("score --data somewhere --out " + (root / "x").string());
    CHECK(r.exit_code == 2);
    CHECK(error_line(r)["kind"] == "config");

    // nonexistent input: domain error with its kind
    r = cli("train --data " + (root / "nope").string() + " --out " + (root / "y").string());
    CHECK(r.exit_code == 1);
    CHECK(error_line(r)["kind"] == "missing_artifact");

    // config with a typo: strict parse rejects it
    const auto bad_cfg = root / "bad.json";
    io::write_json_file(bad_cfg,
                        {{"dataset", {{"kind", "anomaly"}}}, {"methodz", {"loss"}}});
    r = cli("evaluate --config " + bad_cfg.string() + " --out " + (root / "z").string());
    CHECK(r.exit_code == 1);
    const auto line = error_line(r);
    CHECK(line["kind"] == "config");
    CHECK(line["message"].get<std::string>().find("methodz") != std::string::npos);

    // no output directory anywhere
    r = cli("generate --n-train 10 --n-val 2 --n-test 2 --length 12 --channels 1");
    CHECK(r.exit_code == 1);
    CHECK(error_line(r)["kind"] == "config");

    CHECK(cli("--version").exit_code == 0);
    CHECK(cli("--help").exit_code == 0);
}

TEST_CASE("cli honors the output environment variable") {
    const auto root = fresh_dir("cli_env");
    const auto target = root / "env_bundle";
    setenv("DATALENS_OUT", target.string().c_str(), 1);
    const auto r = cli("generate --n-train 10 --n-val 2 --n-test 2 --length 12 --channels 1");
    unsetenv("DATALENS_OUT");
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(target / "data.csv"));
}
