#include "datalens/cli/driver.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "datalens/common/error.hpp"
#include "datalens/common/text.hpp"
#include "datalens/data/flip.hpp"
#include "datalens/data/generate.hpp"
#include "datalens/harness/combine.hpp"
#include "datalens/harness/grid.hpp"
#include "datalens/io/bundle.hpp"
#include "datalens/io/json_file.hpp"
#include "datalens/io/manifest.hpp"
#include "datalens/io/report_io.hpp"
#include "datalens/io/score_io.hpp"
#include "datalens/model/eval.hpp"
#include "datalens/model/train.hpp"
#include "datalens/scoring/influence.hpp"
#include "datalens/scoring/loss_scores.hpp"
#include "datalens/scoring/random_scores.hpp"
#include "datalens/scoring/representer.hpp"

namespace datalens::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path resolve_out(const std::string& out_flag) {
    if (!out_flag.empty()) return out_flag;
    if (const char* env = std::getenv("DATALENS_OUT"); env && *env) return env;
    fail(Error::Kind::config, "no output directory: pass --out or set DATALENS_OUT");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
    require(j.is_object(), Error::Kind::config, where + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known) fail(Error::Kind::config, "unknown key \"" + it.key() + "\" in " + where);
    }
}

void register_bundle_inputs(io::RunManifest& m, const fs::path& dir) {
    m.add_input(dir / "manifest.json");
    m.add_input(dir / "data.csv");
    m.add_input(dir / "truth.csv");
}

void register_bundle_outputs(io::RunManifest& m, const fs::path& dir) {
    m.add_output(dir / "manifest.json");
    m.add_output(dir / "data.csv");
    m.add_output(dir / "truth.csv");
}

void require_model_matches(const model::ModelState& m, const data::TimeSeriesDataset& ds) {
    require(m.arch.input_channels == ds.channels && m.arch.input_length == ds.length &&
                m.arch.num_classes == ds.num_classes,
            Error::Kind::config,
            "model shape (" + std::to_string(m.arch.input_channels) + "x" +
                std::to_string(m.arch.input_length) + ", " +
                std::to_string(m.arch.num_classes) + " classes) does not match dataset (" +
                std::to_string(ds.channels) + "x" + std::to_string(ds.length) + ", " +
                std::to_string(ds.num_classes) + " classes)");
}

std::vector<harness::RatePoint> read_rate_table(const fs::path& path,
                                                const std::string& key_header) {
    std::ifstream in(path);
    if (!in) fail(Error::Kind::missing_artifact, "cannot open " + path.string());
    std::string line;
    std::size_t lineno = 0;
    require(static_cast<bool>(std::getline(in, line)), Error::Kind::parse,
            path.string() + ": empty file");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    require(line == key_header + ",seed,ratio,rate", Error::Kind::parse,
            path.string() + ":1: expected header \"" + key_header + ",seed,ratio,rate\"");
    std::vector<harness::RatePoint> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(lineno);
        const auto fields = split(line, ',');
        require(fields.size() == 4, Error::Kind::parse,
                where + ": expected 4 fields, got " + std::to_string(fields.size()));
        harness::RatePoint r;
        r.column = std::string(fields[0]);
        const long long seed = parse_int(fields[1], where);
        require(seed >= 0, Error::Kind::parse, where + ": seed must be non-negative");
        r.seed = static_cast<std::uint64_t>(seed);
        r.ratio = parse_double(fields[2], where);
        r.rate = parse_double(fields[3], where);
        rows.push_back(std::move(r));
    }
    return rows;
}

// ---- subcommand payloads ----------------------------------------------

struct GenerateOpts {
    std::string out;
    std::uint64_t seed = 1;
    std::size_t n_train = 4500, n_val = 500, n_test = 1000;
    int length = 50, channels = 3;
};

void cmd_generate(const GenerateOpts& o) {
    const fs::path out = resolve_out(o.out);
    const auto t0 = std::chrono::steady_clock::now();
    auto ds = data::generate_anomaly_dataset(o.n_train, o.n_val, o.n_test, o.length, o.channels,
                                             o.seed);
    io::write_bundle(ds, out);

    io::RunManifest manifest("generate",
                             json{{"n_train", o.n_train},
                                  {"n_val", o.n_val},
                                  {"n_test", o.n_test},
                                  {"length", o.length},
                                  {"channels", o.channels},
                                  {"seed", o.seed}},
                             out);
    register_bundle_outputs(manifest, out);
    manifest.set_timing("total", seconds_since(t0));
    manifest.write(out / "run_manifest.json");
    std::cerr << "wrote dataset bundle to " << out.string() << "\n";
}

struct FlipOpts {
    std::string data, out, mode = data::flip_mode_name(data::FlipMode::binary_complement);
    double rate = 0.1;
    std::uint64_t seed = 2;
};

void cmd_flip(const FlipOpts& o) {
    const fs::path out = resolve_out(o.out);
    const auto t0 = std::chrono::steady_clock::now();
    auto ds = io::read_bundle(o.data);
    data::FlipSpec spec;
    spec.rate = o.rate;
    spec.seed = o.seed;
    spec.mode = data::flip_mode_from_name(o.mode);
    ds = data::flip_labels(ds, spec);
    io::write_bundle(ds, out);

    io::RunManifest manifest(
        "flip", json{{"rate", o.rate}, {"mode", o.mode}, {"seed", o.seed}}, out);
    register_bundle_inputs(manifest, o.data);
    register_bundle_outputs(manifest, out);
    manifest.set_timing("total", seconds_since(t0));
    manifest.write(out / "run_manifest.json");
    const auto flipped = std::count(ds.flip_mask.begin(), ds.flip_mask.end(), std::uint8_t{1});
    std::cerr << "flipped " << flipped << " train labels; wrote bundle to " << out.string()
              << "\n";
}

struct TrainOpts {
    std::string data, out, config;
    std::uint64_t seed = 0;
    int threads = 1;
};

void cmd_train(const TrainOpts& o) {
    const fs::path out = resolve_out(o.out);
    auto ds = io::read_bundle(o.data);

    model::TrainConfig tc;
    json cfg_json = json::object();
    if (!o.config.empty()) {
        cfg_json = io::read_json_file(o.config);
        harness::apply_train_json(cfg_json, tc, "config");
    }
    tc.seed = o.seed;
    tc.threads = o.threads;

    const auto arch = model::default_architecture(ds.channels, ds.length, ds.num_classes);
    const auto train_ex = data::make_examples(ds, data::Split::train);
    const auto val_ex = data::make_examples(ds, data::Split::validation);

    const auto t0 = std::chrono::steady_clock::now();
    auto result = model::train_model(arch, train_ex, val_ex, tc);
    const double train_seconds = seconds_since(t0);

    fs::create_directories(out);
    model::save_model(result.model, (out / "model.json").string());
    {
        std::ofstream hist(out / "history.csv");
        if (!hist) fail(Error::Kind::internal, "cannot write " + (out / "history.csv").string());
        hist << "epoch,train_loss,train_accuracy,val_loss,val_accuracy\n";
        for (const auto& e : result.history)
            hist << e.epoch << ',' << format_double(e.train_loss) << ','
                 << format_double(e.train_accuracy) << ',' << format_double(e.val_loss) << ','
                 << format_double(e.val_accuracy) << '\n';
    }

    io::RunManifest manifest("train",
                             json{{"train", cfg_json}, {"seed", o.seed}, {"threads", o.threads}},
                             out);
    register_bundle_inputs(manifest, o.data);
    if (!o.config.empty()) manifest.add_input(o.config);
    manifest.add_output(out / "model.json");
    manifest.add_output(out / "history.csv");
    manifest.set_timing("train", train_seconds);
    manifest.write(out / "run_manifest.json");
    std::cerr << "trained " << result.history.size() << " epochs; final val accuracy "
              << format_double(result.history.back().val_accuracy) << "\n";
}

struct ScoreOpts {
    std::string data, model, method, out, config;
    std::uint64_t seed = 0;
    int threads = 1;
};

void cmd_score(const ScoreOpts& o) {
    const fs::path out = resolve_out(o.out);
    auto ds = io::read_bundle(o.data);
    auto m = model::load_model(o.model);
    require_model_matches(m, ds);

    scoring::InfluenceConfig icfg;
    scoring::RepresenterConfig rcfg;
    json cfg_json = json::object();
    if (!o.config.empty()) {
        cfg_json = io::read_json_file(o.config);
        check_keys(cfg_json, {"influence", "representer"}, "config");
        if (cfg_json.contains("influence"))
            harness::apply_influence_json(cfg_json["influence"], icfg, "config.influence");
        if (cfg_json.contains("representer"))
            harness::apply_representer_json(cfg_json["representer"], rcfg, "config.representer");
    }
    icfg.seed = o.seed;
    icfg.threads = o.threads;
    rcfg.threads = o.threads;

    const auto t0 = std::chrono::steady_clock::now();
    scoring::ScoreVector sv;
    if (o.method == "loss") {
        sv = scoring::loss_scores(m, ds, o.threads);
    } else if (o.method == "random") {
        sv = scoring::random_scores(ds.count(data::Split::train), o.seed);
    } else if (o.method == "influence") {
        sv = scoring::influence_scores(m, ds, icfg);
    } else if (o.method == "classwise_influence") {
        sv = scoring::classwise_influence_scores(m, ds, icfg);
    } else if (o.method == "representer") {
        sv = scoring::representer_scores(m, ds, rcfg);
    } else {
        fail(Error::Kind::config,
             "unknown method \"" + o.method +
                 "\"; expected loss, random, influence, classwise_influence, or representer");
    }
    const double score_seconds = seconds_since(t0);

    io::save_scores(sv, out / "scores.csv");

    io::RunManifest manifest(
        "score",
        json{{"method", o.method}, {"config", cfg_json}, {"seed", o.seed},
             {"threads", o.threads}},
        out);
    register_bundle_inputs(manifest, o.data);
    manifest.add_input(o.model);
    if (!o.config.empty()) manifest.add_input(o.config);
    manifest.add_output(out / "scores.csv");
    manifest.add_output(out / "scores.csv.meta.json");
    manifest.set_timing(o.method, score_seconds);
    manifest.write(out / "run_manifest.json");
    std::cerr << "wrote " << sv.values.size() << " " << o.method << " scores to "
              << (out / "scores.csv").string() << "\n";
}

struct EvaluateOpts {
    std::string config, data, scores, out;
    std::string direction = harness::direction_name(harness::Direction::high_first);
    std::vector<double> ratios;
};

void run_suite(const std::string& command, const std::string& config_path,
               const std::string& out_flag) {
    const fs::path out = resolve_out(out_flag);
    const json raw = io::read_json_file(config_path);
    const auto cfg = harness::parse_grid_config(raw);

    const auto t0 = std::chrono::steady_clock::now();
    auto rep = harness::run_grid(cfg, &std::cerr);
    const double suite_seconds = seconds_since(t0);

    io::RunManifest manifest(command, rep.resolved_config, out);
    manifest.add_input(config_path);
    if (cfg.dataset_kind == "bundle") register_bundle_inputs(manifest, cfg.bundle_path);
    io::write_report(rep, out, manifest);
    manifest.set_timing("suite", suite_seconds);
    manifest.write(out / "run_manifest.json");
    std::cerr << "report written to " << out.string() << "\n";
}

void cmd_evaluate(const EvaluateOpts& o) {
    if (!o.config.empty()) {
        require(o.data.empty() && o.scores.empty(), Error::Kind::config,
                "--config runs the full suite; it cannot be combined with --data/--scores");
        run_suite("evaluate", o.config, o.out);
        return;
    }
    require(!o.data.empty() && !o.scores.empty(), Error::Kind::config,
            "evaluate needs either --config or both --data and --scores");

    const fs::path out = resolve_out(o.out);
    const auto t0 = std::chrono::steady_clock::now();
    auto ds = io::read_bundle(o.data);
    auto sv = io::load_scores(o.scores);
    sv.validate(ds.count(data::Split::train));
    const auto direction = harness::direction_from_name(o.direction);
    const auto order = harness::rank(sv.values, direction);
    const auto mask = harness::train_flip_mask(ds);

    std::vector<double> ratios = o.ratios;
    if (ratios.empty()) ratios = {0.10, 0.25, 0.50};

    std::string table = "method,direction,ratio,inspected,detected,rate\n";
    for (const auto& pt : harness::inspection_curve(order, mask, ratios))
        table += sv.method + "," + o.direction + "," + format_double(pt.ratio) + "," +
                 std::to_string(pt.inspected) + "," + std::to_string(pt.detected) + "," +
                 format_double(pt.rate) + "\n";

    fs::create_directories(out);
    {
        std::ofstream f(out / "evaluation.csv");
        if (!f) fail(Error::Kind::internal, "cannot write " + (out / "evaluation.csv").string());
        f << table;
    }

    io::RunManifest manifest(
        "evaluate", json{{"direction", o.direction}, {"ratios", ratios}}, out);
    register_bundle_inputs(manifest, o.data);
    manifest.add_input(o.scores);
    manifest.add_input(o.scores + ".meta.json");
    manifest.add_output(out / "evaluation.csv");
    manifest.set_timing("total", seconds_since(t0));
    manifest.write(out / "run_manifest.json");
    std::cerr << table;
}

struct CombineOpts {
    std::vector<std::string> scores;
    std::vector<std::string> directions;
    std::vector<double> weights;
    std::string out;
};

void cmd_combine(const CombineOpts& o) {
    const fs::path out = resolve_out(o.out);
    require(o.scores.size() >= 2, Error::Kind::config,
            "combine needs at least two --scores files");
    require(o.directions.size() == o.scores.size(), Error::Kind::config,
            "pass exactly one --direction per --scores file");
    require(o.weights.empty() || o.weights.size() == o.scores.size(), Error::Kind::config,
            "pass either no --weight or one per --scores file");

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<scoring::ScoreVector> loaded;
    for (const auto& path : o.scores) loaded.push_back(io::load_scores(path));

    std::vector<harness::CombineInput> inputs;
    std::string name;
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        harness::CombineInput in;
        in.scores = &loaded[i];
        in.direction = harness::direction_from_name(o.directions[i]);
        in.weight = o.weights.empty() ? 1.0 / static_cast<double>(loaded.size()) : o.weights[i];
        inputs.push_back(in);
        if (i) name += "+";
        name += loaded[i].method;
        if (loaded[i].classwise) name += "_classwise";
    }
    auto combined = harness::combine(inputs);
    combined.method = name;
    io::save_scores(combined, out / "scores.csv");

    io::RunManifest manifest(
        "combine", json{{"directions", o.directions}, {"weights", o.weights}}, out);
    for (const auto& path : o.scores) {
        manifest.add_input(path);
        manifest.add_input(path + ".meta.json");
    }
    manifest.add_output(out / "scores.csv");
    manifest.add_output(out / "scores.csv.meta.json");
    manifest.set_timing("total", seconds_since(t0));
    manifest.write(out / "run_manifest.json");
    std::cerr << "wrote combined scores (" << name << ") to " << (out / "scores.csv").string()
              << "\n";
}

struct ReportOpts {
    std::string config, from, out;
};

void cmd_report(const ReportOpts& o) {
    require(o.config.empty() != o.from.empty(), Error::Kind::config,
            "report needs exactly one of --config (run the suite) or --from (re-render)");
    if (!o.config.empty()) {
        run_suite("report", o.config, o.out);
        return;
    }

    // re-render summaries and plots from a completed run's long-form tables
    const fs::path out = resolve_out(o.out);
    const fs::path src = o.from;
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(out);
    io::RunManifest manifest("report", json{{"from", src.generic_string()}}, out);

    harness::ExperimentReport rep;
    bool any = false;
    if (fs::exists(src / "detection.csv")) {
        rep.detection = read_rate_table(src / "detection.csv", "column");
        manifest.add_input(src / "detection.csv");
        any = true;
    }
    if (fs::exists(src / "combinations.csv")) {
        rep.combinations = read_rate_table(src / "combinations.csv", "name");
        manifest.add_input(src / "combinations.csv");
        any = true;
    }
    if (fs::exists(src / "curves.csv")) {
        rep.curves = read_rate_table(src / "curves.csv", "column");
        manifest.add_input(src / "curves.csv");
        any = true;
    }
    require(any, Error::Kind::missing_artifact,
            src.string() + " has none of detection.csv, combinations.csv, curves.csv");

    io::write_rendered_tables(rep, out, manifest);
    manifest.set_timing("total", seconds_since(t0));
    manifest.write(out / "run_manifest.json");
    std::cerr << "re-rendered report written to " << out.string() << "\n";
}

} // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"training-sample suspicion scoring and label-noise experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(io::kToolName) + " " + io::kToolVersion);

    GenerateOpts gen;
    auto* cgen = app.add_subcommand("generate", "synthesize a labeled time-series bundle");
    cgen->add_option("--out", gen.out, "output directory (or DATALENS_OUT)");
    cgen->add_option("--seed", gen.seed, "generator seed");
    cgen->add_option("--n-train", gen.n_train, "training samples");
    cgen->add_option("--n-val", gen.n_val, "validation samples");
    cgen->add_option("--n-test", gen.n_test, "test samples");
    cgen->add_option("--length", gen.length, "series length");
    cgen->add_option("--channels", gen.channels, "channels per sample");

    FlipOpts flip;
    auto* cflip = app.add_subcommand("flip", "flip a fraction of training labels");
    cflip->add_option("--data", flip.data, "input bundle directory")->required();
    cflip->add_option("--out", flip.out, "output directory (or DATALENS_OUT)");
    cflip->add_option("--rate", flip.rate, "fraction of train labels to flip")->required();
    cflip->add_option("--mode", flip.mode, "binary_complement or uniform_other_class");
    cflip->add_option("--seed", flip.seed, "flip seed");

    TrainOpts train;
    auto* ctrain = app.add_subcommand("train", "train a classifier on a bundle");
    ctrain->add_option("--data", train.data, "input bundle directory")->required();
    ctrain->add_option("--out", train.out, "output directory (or DATALENS_OUT)");
    ctrain->add_option("--config", train.config, "training config JSON");
    ctrain->add_option("--seed", train.seed, "training seed");
    ctrain->add_option("--threads", train.threads, "worker threads");

    ScoreOpts score;
    auto* cscore = app.add_subcommand("score", "score training samples for label suspicion");
    cscore->add_option("--data", score.data, "input bundle directory")->required();
    cscore->add_option("--model", score.model, "trained model JSON")->required();
    cscore
        ->add_option("--method", score.method,
                     "loss, random, influence, classwise_influence, or representer")
        ->required();
    cscore->add_option("--out", score.out, "output directory (or DATALENS_OUT)");
    cscore->add_option("--config", score.config, "scoring config JSON");
    cscore->add_option("--seed", score.seed, "solver seed");
    cscore->add_option("--threads", score.threads, "worker threads");

    EvaluateOpts eval;
    auto* ceval = app.add_subcommand(
        "evaluate", "measure detection rates from score artifacts or run the configured suite");
    ceval->add_option("--config", eval.config, "experiment suite config JSON");
    ceval->add_option("--data", eval.data, "bundle directory (artifact mode)");
    ceval->add_option("--scores", eval.scores, "scores CSV (artifact mode)");
    ceval->add_option("--direction", eval.direction,
                      "low_first, high_first, or absolute_high_first");
    ceval->add_option("--ratio", eval.ratios, "inspection ratio (repeatable)");
    ceval->add_option("--out", eval.out, "output directory (or DATALENS_OUT)");

    CombineOpts comb;
    auto* ccomb = app.add_subcommand("combine", "blend score files into one ranking signal");
    ccomb->add_option("--scores", comb.scores, "scores CSV (repeat per constituent)");
    ccomb->add_option("--direction", comb.directions,
                      "suspicion direction per constituent (repeatable)");
    ccomb->add_option("--weight", comb.weights, "weight per constituent (repeatable)");
    ccomb->add_option("--out", comb.out, "output directory (or DATALENS_OUT)");

    ReportOpts report;
    auto* creport =
        app.add_subcommand("report", "run the suite from config or re-render a finished run");
    creport->add_option("--config", report.config, "experiment suite config JSON");
    creport->add_option("--from", report.from, "directory of a completed run");
    creport->add_option("--out", report.out, "output directory (or DATALENS_OUT)");

    try {
        app.parse(argc, argv);
        if (cgen->parsed()) cmd_generate(gen);
        if (cflip->parsed()) cmd_flip(flip);
        if (ctrain->parsed()) cmd_train(train);
        if (cscore->parsed()) cmd_score(score);
        if (ceval->parsed()) cmd_evaluate(eval);
        if (ccomb->parsed()) cmd_combine(comb);
        if (creport->parsed()) cmd_report(report);
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << json{{"kind", "config"}, {"message", e.what()}}.dump() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << json{{"kind", e.kind_name()}, {"message", e.what()}}.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"kind", "internal"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }
}

} // namespace datalens::cli
