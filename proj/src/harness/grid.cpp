#include "datalens/harness/grid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "datalens/common/error.hpp"
#include "datalens/common/rng.hpp"
#include "datalens/common/text.hpp"
#include "datalens/data/generate.hpp"
#include "datalens/harness/combine.hpp"
#include "datalens/io/bundle.hpp"
#include "datalens/model/eval.hpp"
#include "datalens/scoring/loss_scores.hpp"
#include "datalens/scoring/random_scores.hpp"

namespace datalens::harness {
namespace {

using nlohmann::json;

// rng streams for per-seed work, distinct from the trainer's 0..epochs range
constexpr std::uint64_t kRandomScoreStream = 101;
constexpr std::uint64_t kInfluenceStream = 102;

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

const json* maybe(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double num_or(const json& j, const char* key, double fallback, const std::string& where) {
    const json* v = maybe(j, key);
    if (!v) return fallback;
    require(v->is_number(), Error::Kind::config, where + "." + key + " must be a number");
    return v->get<double>();
}

std::int64_t int_or(const json& j, const char* key, std::int64_t fallback,
                    const std::string& where) {
    const json* v = maybe(j, key);
    if (!v) return fallback;
    require(v->is_number_integer(), Error::Kind::config, where + "." + key + " must be an integer");
    return v->get<std::int64_t>();
}

std::string str_or(const json& j, const char* key, const std::string& fallback,
                   const std::string& where) {
    const json* v = maybe(j, key);
    if (!v) return fallback;
    require(v->is_string(), Error::Kind::config, where + "." + key + " must be a string");
    return v->get<std::string>();
}

bool bool_or(const json& j, const char* key, bool fallback, const std::string& where) {
    const json* v = maybe(j, key);
    if (!v) return fallback;
    require(v->is_boolean(), Error::Kind::config, where + "." + key + " must be a boolean");
    return v->get<bool>();
}

std::size_t size_field(const json& j, const char* key, std::int64_t fallback,
                       const std::string& where) {
    std::int64_t v = int_or(j, key, fallback, where);
    require(v >= 0, Error::Kind::config, where + "." + key + " must be non-negative");
    return static_cast<std::size_t>(v);
}

void parse_dataset(const json& d, GridConfig& cfg) {
    cfg.dataset_kind = str_or(d, "kind", "anomaly", "config.dataset");
    if (cfg.dataset_kind == "anomaly") {
        check_keys(d, {"kind", "n_train", "n_val", "n_test", "length", "channels", "seed"},
                   "config.dataset");
        cfg.n_train = size_field(d, "n_train", 4500, "config.dataset");
        cfg.n_val = size_field(d, "n_val", 500, "config.dataset");
        cfg.n_test = size_field(d, "n_test", 1000, "config.dataset");
        cfg.length = static_cast<int>(int_or(d, "length", 50, "config.dataset"));
        cfg.channels = static_cast<int>(int_or(d, "channels", 3, "config.dataset"));
        cfg.dataset_seed = static_cast<std::uint64_t>(int_or(d, "seed", 1, "config.dataset"));
    } else if (cfg.dataset_kind == "bundle") {
        check_keys(d, {"kind", "path"}, "config.dataset");
        cfg.bundle_path = str_or(d, "path", "", "config.dataset");
        require(!cfg.bundle_path.empty(), Error::Kind::config,
                "config.dataset.path is required for kind \"bundle\"");
    } else {
        fail(Error::Kind::config,
             "config.dataset.kind must be \"anomaly\" or \"bundle\", got \"" + cfg.dataset_kind +
                 "\"");
    }
}

void parse_flip(const json& f, GridConfig& cfg) {
    check_keys(f, {"rate", "mode", "seed"}, "config.flip");
    cfg.do_flip = true;
    cfg.flip.rate = num_or(f, "rate", 0.1, "config.flip");
    cfg.flip.seed = static_cast<std::uint64_t>(int_or(f, "seed", 2, "config.flip"));
    cfg.flip.mode = data::flip_mode_from_name(
        str_or(f, "mode", data::flip_mode_name(data::FlipMode::binary_complement), "config.flip"));
}

std::vector<double> parse_ratio_array(const json& a, const std::string& where) {
    require(a.is_array() && !a.empty(), Error::Kind::config, where + " must be a non-empty array");
    std::vector<double> out;
    for (const auto& v : a) {
        require(v.is_number(), Error::Kind::config, where + " entries must be numbers");
        double r = v.get<double>();
        require(r > 0.0 && r <= 1.0, Error::Kind::config, where + " entries must lie in (0, 1]");
        out.push_back(r);
    }
    return out;
}

GridConfig::Combination parse_combination(const json& c, std::size_t index) {
    const std::string where = "config.combinations[" + std::to_string(index) + "]";
    GridConfig::Combination comb;
    if (c.is_string()) {
        // "a+b+c" shorthand: columns joined by '+', equal weights
        comb.name = c.get<std::string>();
        std::vector<std::string> parts;
        std::string cur;
        for (char ch : comb.name) {
            if (ch == '+') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(ch);
            }
        }
        parts.push_back(cur);
        require(parts.size() >= 2, Error::Kind::config,
                where + ": expected at least two '+'-joined column names, got \"" + comb.name +
                    "\"");
        for (const auto& p : parts) {
            column_by_name(p); // validates
            comb.constituents.emplace_back(p, 1.0 / static_cast<double>(parts.size()));
        }
        return comb;
    }
    check_keys(c, {"name", "constituents"}, where);
    comb.name = str_or(c, "name", "", where);
    require(!comb.name.empty(), Error::Kind::config, where + ".name is required");
    const json* cs = maybe(c, "constituents");
    require(cs && cs->is_array() && cs->size() >= 2, Error::Kind::config,
            where + ".constituents must be an array of at least two entries");
    bool any_weight = false;
    for (std::size_t i = 0; i < cs->size(); ++i) {
        const json& e = (*cs)[i];
        const std::string ewhere = where + ".constituents[" + std::to_string(i) + "]";
        check_keys(e, {"column", "weight"}, ewhere);
        std::string col = str_or(e, "column", "", ewhere);
        require(!col.empty(), Error::Kind::config, ewhere + ".column is required");
        column_by_name(col);
        double w = num_or(e, "weight", -1.0, ewhere);
        if (e.contains("weight")) any_weight = true;
        comb.constituents.emplace_back(col, w);
    }
    if (any_weight) {
        for (auto& [col, w] : comb.constituents)
            require(w >= 0.0, Error::Kind::config,
                    where + ": either all constituents specify a weight or none do");
    } else {
        for (auto& [col, w] : comb.constituents)
            w = 1.0 / static_cast<double>(comb.constituents.size());
    }
    return comb;
}

const scoring::ScoreVector& scores_for_method(const SeedArtifacts& art,
                                              const std::string& method) {
    for (const auto& [name, sv] : art.scores)
        if (name == method) return sv;
    fail(Error::Kind::internal, "scores for method \"" + method + "\" were not computed");
}

std::vector<std::size_t> column_ranking(const SeedArtifacts& art, const std::string& column) {
    const ColumnSpec spec = column_by_name(column);
    return rank(scores_for_method(art, spec.method).values, spec.direction);
}

} // namespace

void apply_train_json(const json& t, model::TrainConfig& tc, const std::string& where) {
    check_keys(t,
               {"epochs", "batch_size", "learning_rate", "optimizer", "momentum", "beta1", "beta2",
                "epsilon"},
               where);
    tc.epochs = static_cast<int>(int_or(t, "epochs", tc.epochs, where));
    tc.batch_size = static_cast<int>(int_or(t, "batch_size", tc.batch_size, where));
    tc.learning_rate = num_or(t, "learning_rate", tc.learning_rate, where);
    tc.optimizer = str_or(t, "optimizer", tc.optimizer, where);
    tc.momentum = num_or(t, "momentum", tc.momentum, where);
    tc.beta1 = num_or(t, "beta1", tc.beta1, where);
    tc.beta2 = num_or(t, "beta2", tc.beta2, where);
    tc.epsilon = num_or(t, "epsilon", tc.epsilon, where);
}

void apply_influence_json(const json& f, scoring::InfluenceConfig& ic, const std::string& where) {
    check_keys(f,
               {"damping", "solver", "scope", "reference", "cg_tolerance", "cg_max_iter",
                "lissa_scale", "lissa_depth", "lissa_repeats", "lissa_batch"},
               where);
    ic.damping = num_or(f, "damping", ic.damping, where);
    ic.solver = scoring::solver_from_name(str_or(f, "solver", scoring::solver_name(ic.solver), where));
    ic.scope = scoring::scope_from_name(str_or(f, "scope", scoring::scope_name(ic.scope), where));
    ic.reference =
        scoring::reference_from_name(str_or(f, "reference", scoring::reference_name(ic.reference), where));
    ic.cg_tolerance = num_or(f, "cg_tolerance", ic.cg_tolerance, where);
    ic.cg_max_iter = static_cast<int>(int_or(f, "cg_max_iter", ic.cg_max_iter, where));
    ic.lissa_scale = num_or(f, "lissa_scale", ic.lissa_scale, where);
    ic.lissa_depth = static_cast<int>(int_or(f, "lissa_depth", ic.lissa_depth, where));
    ic.lissa_repeats = static_cast<int>(int_or(f, "lissa_repeats", ic.lissa_repeats, where));
    ic.lissa_batch = static_cast<int>(int_or(f, "lissa_batch", ic.lissa_batch, where));
}

void apply_representer_json(const json& r, scoring::RepresenterConfig& rc,
                            const std::string& where) {
    check_keys(r, {"lambda", "tolerance", "max_steps"}, where);
    rc.lambda = num_or(r, "lambda", rc.lambda, where);
    rc.tolerance = num_or(r, "tolerance", rc.tolerance, where);
    rc.max_steps = static_cast<int>(int_or(r, "max_steps", rc.max_steps, where));
}

std::vector<ColumnSpec> columns_for_method(const std::string& method) {
    if (method == "loss") return {{"loss", "loss", Direction::high_first}};
    if (method == "random") return {{"random", "random", Direction::high_first}};
    if (method == "influence")
        return {{"low", "influence", Direction::low_first},
                {"high", "influence", Direction::high_first},
                {"absolute", "influence", Direction::absolute_high_first}};
    if (method == "classwise_influence")
        return {{"classwise_low", "classwise_influence", Direction::low_first},
                {"classwise_high", "classwise_influence", Direction::high_first},
                {"classwise_absolute", "classwise_influence", Direction::absolute_high_first}};
    if (method == "representer")
        return {{"representer_low", "representer", Direction::low_first},
                {"representer_high", "representer", Direction::high_first}};
    fail(Error::Kind::config, "unknown scoring method \"" + method + "\"");
}

ColumnSpec column_by_name(const std::string& column) {
    static const char* families[] = {"loss", "random", "influence", "classwise_influence",
                                     "representer"};
    for (const char* m : families)
        for (const auto& col : columns_for_method(m))
            if (col.name == column) return col;
    fail(Error::Kind::config, "unknown ranking column \"" + column + "\"");
}

GridConfig parse_grid_config(const json& j) {
    check_keys(j,
               {"dataset", "flip", "train", "influence", "representer", "methods", "ratios",
                "curve_ratios", "seeds", "repeats", "combinations", "diff", "correction",
                "deletion", "timing", "threads"},
               "config");
    GridConfig cfg;

    const json* d = maybe(j, "dataset");
    require(d != nullptr, Error::Kind::config, "config.dataset is required");
    parse_dataset(*d, cfg);

    if (const json* f = maybe(j, "flip")) parse_flip(*f, cfg);
    if (const json* t = maybe(j, "train")) apply_train_json(*t, cfg.train, "config.train");
    if (const json* f = maybe(j, "influence"))
        apply_influence_json(*f, cfg.influence, "config.influence");
    if (const json* r = maybe(j, "representer"))
        apply_representer_json(*r, cfg.representer, "config.representer");

    if (const json* m = maybe(j, "methods")) {
        require(m->is_array() && !m->empty(), Error::Kind::config,
                "config.methods must be a non-empty array");
        std::set<std::string> seen;
        for (const auto& v : *m) {
            require(v.is_string(), Error::Kind::config, "config.methods entries must be strings");
            std::string name = v.get<std::string>();
            columns_for_method(name); // validates
            require(seen.insert(name).second, Error::Kind::config,
                    "config.methods lists \"" + name + "\" twice");
            cfg.methods.push_back(name);
        }
    } else {
        cfg.methods = {"loss", "random", "influence", "classwise_influence", "representer"};
    }

    if (const json* r = maybe(j, "ratios"))
        cfg.ratios = parse_ratio_array(*r, "config.ratios");
    else
        cfg.ratios = {0.10, 0.25, 0.50};

    if (const json* r = maybe(j, "curve_ratios")) {
        cfg.curve_ratios = parse_ratio_array(*r, "config.curve_ratios");
    } else {
        for (int i = 1; i <= 20; ++i) cfg.curve_ratios.push_back(0.05 * i);
    }

    if (const json* s = maybe(j, "seeds")) {
        require(s->is_array() && !s->empty(), Error::Kind::config,
                "config.seeds must be a non-empty array");
        for (const auto& v : *s) {
            require(v.is_number_integer() && v.get<std::int64_t>() >= 0, Error::Kind::config,
                    "config.seeds entries must be non-negative integers");
            cfg.seeds.push_back(v.get<std::uint64_t>());
        }
    } else {
        cfg.seeds = {0};
    }

    cfg.repeats = static_cast<int>(int_or(j, "repeats", cfg.repeats, "config"));
    require(cfg.repeats >= 1, Error::Kind::config, "config.repeats must be at least 1");

    if (const json* c = maybe(j, "combinations")) {
        require(c->is_array(), Error::Kind::config, "config.combinations must be an array");
        std::set<std::string> seen;
        for (std::size_t i = 0; i < c->size(); ++i) {
            auto comb = parse_combination((*c)[i], i);
            require(seen.insert(comb.name).second, Error::Kind::config,
                    "config.combinations lists \"" + comb.name + "\" twice");
            cfg.combinations.push_back(std::move(comb));
        }
    }

    if (const json* df = maybe(j, "diff")) {
        check_keys(*df, {"ratio", "window"}, "config.diff");
        cfg.has_diff = true;
        cfg.diff_ratio = num_or(*df, "ratio", cfg.diff_ratio, "config.diff");
        if (const json* w = maybe(*df, "window")) {
            require(w->is_array() && w->size() == 2 && (*w)[0].is_number_integer() &&
                        (*w)[1].is_number_integer(),
                    Error::Kind::config, "config.diff.window must be [lo, hi]");
            std::int64_t lo = (*w)[0].get<std::int64_t>();
            std::int64_t hi = (*w)[1].get<std::int64_t>();
            require(lo >= 0 && hi > lo, Error::Kind::config,
                    "config.diff.window must satisfy 0 <= lo < hi");
            cfg.diff_lo = static_cast<std::size_t>(lo);
            cfg.diff_hi = static_cast<std::size_t>(hi);
        }
    }

    if (const json* c = maybe(j, "correction")) {
        check_keys(*c, {"column", "ratio"}, "config.correction");
        cfg.has_correction = true;
        cfg.correction_column = str_or(*c, "column", cfg.correction_column, "config.correction");
        cfg.correction_ratio = num_or(*c, "ratio", cfg.correction_ratio, "config.correction");
    }
    if (const json* c = maybe(j, "deletion")) {
        check_keys(*c, {"column", "ratio"}, "config.deletion");
        cfg.has_deletion = true;
        cfg.deletion_column = str_or(*c, "column", cfg.deletion_column, "config.deletion");
        cfg.deletion_ratio = num_or(*c, "ratio", cfg.deletion_ratio, "config.deletion");
    }

    cfg.timing = bool_or(j, "timing", false, "config");
    cfg.threads = static_cast<int>(int_or(j, "threads", 1, "config"));
    require(cfg.threads >= 1, Error::Kind::config, "config.threads must be at least 1");

    // every referenced column must come from a requested method
    auto require_method = [&](const std::string& column, const std::string& who) {
        const std::string method = column_by_name(column).method;
        if (std::find(cfg.methods.begin(), cfg.methods.end(), method) == cfg.methods.end())
            fail(Error::Kind::config, who + " uses column \"" + column + "\" but method \"" +
                                          method + "\" is not in config.methods");
    };
    for (const auto& comb : cfg.combinations)
        for (const auto& [col, w] : comb.constituents)
            require_method(col, "combination \"" + comb.name + "\"");
    if (cfg.has_correction) require_method(cfg.correction_column, "config.correction");
    if (cfg.has_deletion) require_method(cfg.deletion_column, "config.deletion");

    return cfg;
}

json grid_config_to_json(const GridConfig& cfg) {
    json j;
    if (cfg.dataset_kind == "anomaly") {
        j["dataset"] = {{"kind", "anomaly"},       {"n_train", cfg.n_train},
                        {"n_val", cfg.n_val},      {"n_test", cfg.n_test},
                        {"length", cfg.length},    {"channels", cfg.channels},
                        {"seed", cfg.dataset_seed}};
    } else {
        j["dataset"] = {{"kind", "bundle"}, {"path", cfg.bundle_path}};
    }
    if (cfg.do_flip)
        j["flip"] = {{"rate", cfg.flip.rate},
                     {"mode", data::flip_mode_name(cfg.flip.mode)},
                     {"seed", cfg.flip.seed}};
    j["train"] = {{"epochs", cfg.train.epochs},
                  {"batch_size", cfg.train.batch_size},
                  {"learning_rate", cfg.train.learning_rate},
                  {"optimizer", cfg.train.optimizer},
                  {"momentum", cfg.train.momentum},
                  {"beta1", cfg.train.beta1},
                  {"beta2", cfg.train.beta2},
                  {"epsilon", cfg.train.epsilon}};
    j["influence"] = {{"damping", cfg.influence.damping},
                      {"solver", scoring::solver_name(cfg.influence.solver)},
                      {"scope", scoring::scope_name(cfg.influence.scope)},
                      {"reference", scoring::reference_name(cfg.influence.reference)},
                      {"cg_tolerance", cfg.influence.cg_tolerance},
                      {"cg_max_iter", cfg.influence.cg_max_iter},
                      {"lissa_scale", cfg.influence.lissa_scale},
                      {"lissa_depth", cfg.influence.lissa_depth},
                      {"lissa_repeats", cfg.influence.lissa_repeats},
                      {"lissa_batch", cfg.influence.lissa_batch}};
    j["representer"] = {{"lambda", cfg.representer.lambda},
                        {"tolerance", cfg.representer.tolerance},
                        {"max_steps", cfg.representer.max_steps}};
    j["methods"] = cfg.methods;
    j["ratios"] = cfg.ratios;
    j["curve_ratios"] = cfg.curve_ratios;
    j["seeds"] = cfg.seeds;
    j["repeats"] = cfg.repeats;
    json combs = json::array();
    for (const auto& comb : cfg.combinations) {
        json cs = json::array();
        for (const auto& [col, w] : comb.constituents)
            cs.push_back({{"column", col}, {"weight", w}});
        combs.push_back({{"name", comb.name}, {"constituents", cs}});
    }
    j["combinations"] = combs;
    if (cfg.has_diff)
        j["diff"] = {{"ratio", cfg.diff_ratio},
                     {"window", {cfg.diff_lo, cfg.diff_hi}}};
    if (cfg.has_correction)
        j["correction"] = {{"column", cfg.correction_column}, {"ratio", cfg.correction_ratio}};
    if (cfg.has_deletion)
        j["deletion"] = {{"column", cfg.deletion_column}, {"ratio", cfg.deletion_ratio}};
    j["timing"] = cfg.timing;
    j["threads"] = cfg.threads;
    return j;
}

ExperimentReport run_grid(const GridConfig& cfg, std::ostream* log) {
    auto say = [&](const std::string& line) {
        if (log) *log << line << '\n' << std::flush;
    };

    ExperimentReport rep;
    rep.resolved_config = grid_config_to_json(cfg);

    if (cfg.dataset_kind == "anomaly") {
        say("generating dataset");
        rep.dataset = data::generate_anomaly_dataset(cfg.n_train, cfg.n_val, cfg.n_test,
                                                     cfg.length, cfg.channels, cfg.dataset_seed);
    } else {
        say("loading bundle " + cfg.bundle_path);
        rep.dataset = io::read_bundle(cfg.bundle_path);
    }
    if (cfg.do_flip) rep.dataset = data::flip_labels(rep.dataset, cfg.flip);
    const auto& ds = rep.dataset;

    const auto mask = train_flip_mask(ds);
    const bool have_flips =
        std::count(mask.begin(), mask.end(), std::uint8_t{1}) > 0;
    if (!have_flips)
        rep.warnings.push_back(
            "training split has no flipped labels; detection stages were skipped");

    const model::ArchitectureSpec arch =
        model::default_architecture(ds.channels, ds.length, ds.num_classes);
    const auto train_ex = data::make_examples(ds, data::Split::train);
    const auto val_ex = data::make_examples(ds, data::Split::validation);
    const auto test_ex = data::make_examples(ds, data::Split::test);

    for (std::uint64_t seed : cfg.seeds) {
        SeedArtifacts art;
        art.seed = seed;

        auto tcfg = cfg.train;
        tcfg.seed = seed;
        tcfg.threads = cfg.threads;
        say("seed " + std::to_string(seed) + ": training (" + std::to_string(tcfg.epochs) +
            " epochs)");
        auto trained = model::train_model(arch, train_ex, val_ex, tcfg);
        art.model = std::move(trained.model);
        art.val_accuracy = trained.history.back().val_accuracy;
        art.test_accuracy = model::accuracy(art.model, test_ex, cfg.threads);
        say("seed " + std::to_string(seed) +
            ": test accuracy " + format_double(art.test_accuracy));

        for (const auto& method : cfg.methods) {
            say("seed " + std::to_string(seed) + ": scoring " + method);
            if (method == "loss") {
                art.scores.emplace_back(method, scoring::loss_scores(art.model, ds, cfg.threads));
            } else if (method == "random") {
                art.scores.emplace_back(
                    method, scoring::random_scores(ds.count(data::Split::train),
                                                   derive_seed(seed, kRandomScoreStream)));
            } else if (method == "influence" || method == "classwise_influence") {
                auto icfg = cfg.influence;
                icfg.seed = derive_seed(seed, kInfluenceStream);
                icfg.threads = cfg.threads;
                art.scores.emplace_back(method,
                                        method == "influence"
                                            ? scoring::influence_scores(art.model, ds, icfg)
                                            : scoring::classwise_influence_scores(art.model, ds,
                                                                                  icfg));
            } else if (method == "representer") {
                auto rcfg = cfg.representer;
                rcfg.threads = cfg.threads;
                art.scores.emplace_back(method,
                                        scoring::representer_scores(art.model, ds, rcfg));
            } else {
                fail(Error::Kind::internal, "unhandled method \"" + method + "\"");
            }
        }

        if (have_flips) {
            for (const auto& method : cfg.methods) {
                const auto& sv = scores_for_method(art, method);
                for (const auto& col : columns_for_method(method)) {
                    const auto order = rank(sv.values, col.direction);
                    for (double ratio : cfg.ratios)
                        rep.detection.push_back(
                            {col.name, seed, ratio, detection_rate(order, mask, ratio)});
                    for (const auto& pt : inspection_curve(order, mask, cfg.curve_ratios))
                        rep.curves.push_back({col.name, seed, pt.ratio, pt.rate});
                }
            }
        }

        for (const auto& comb : cfg.combinations) {
            std::vector<CombineInput> inputs;
            for (const auto& [col, w] : comb.constituents) {
                const ColumnSpec spec = column_by_name(col);
                inputs.push_back({&scores_for_method(art, spec.method), spec.direction, w});
            }
            auto combined = combine(inputs);
            combined.method = comb.name;
            if (have_flips) {
                const auto order = rank(combined.values, Direction::high_first);
                for (double ratio : cfg.ratios)
                    rep.combinations.push_back(
                        {comb.name, seed, ratio, detection_rate(order, mask, ratio)});
            }
            art.combined.emplace_back(comb.name, std::move(combined));
        }

        rep.per_seed.push_back(std::move(art));
    }

    const SeedArtifacts& first = rep.per_seed.front();

    if (cfg.has_diff && have_flips) {
        say("diff: per-sample detection comparison");
        rep.has_diff = true;
        rep.diff_ratio = cfg.diff_ratio;
        std::size_t lo = cfg.diff_lo, hi = cfg.diff_hi;
        if (lo == 0 && hi == 0) hi = mask.size();
        rep.diff_window = {lo, hi};
        std::vector<NamedRanking> rankings;
        for (const auto& method : cfg.methods) {
            const auto& sv = scores_for_method(first, method);
            for (const auto& col : columns_for_method(method))
                rankings.push_back({col.name, rank(sv.values, col.direction)});
        }
        rep.diff = detection_diff(rankings, mask, cfg.diff_ratio, lo, hi);
    } else if (cfg.has_diff) {
        rep.warnings.push_back("diff stage skipped: no flipped labels");
    }

    if (cfg.has_correction || cfg.has_deletion) {
        auto rcfg = cfg.train;
        rcfg.seed = cfg.seeds.front();
        rcfg.threads = cfg.threads;
        say("retrain baseline (" + std::to_string(cfg.repeats) + " repeats)");
        const RepeatStats baseline = repeat_training(ds, arch, rcfg, cfg.repeats);
        if (cfg.has_correction) {
            say("correction experiment: column " + cfg.correction_column);
            rep.has_correction = true;
            rep.correction_column = cfg.correction_column;
            rep.correction_ratio = cfg.correction_ratio;
            rep.correction =
                correction_experiment(ds, column_ranking(first, cfg.correction_column),
                                      cfg.correction_ratio, arch, rcfg, cfg.repeats, &baseline);
        }
        if (cfg.has_deletion) {
            say("deletion experiment: column " + cfg.deletion_column);
            rep.has_deletion = true;
            rep.deletion_column = cfg.deletion_column;
            rep.deletion_ratio = cfg.deletion_ratio;
            rep.deletion =
                deletion_experiment(ds, column_ranking(first, cfg.deletion_column),
                                    cfg.deletion_ratio, arch, rcfg, cfg.repeats, &baseline);
        }
    }

    if (cfg.timing) {
        say("timing report");
        rep.has_timing = true;
        TimingRequest req;
        req.methods = cfg.methods;
        req.influence = cfg.influence;
        req.influence.seed = derive_seed(cfg.seeds.front(), kInfluenceStream);
        req.influence.threads = cfg.threads;
        req.representer = cfg.representer;
        req.representer.threads = cfg.threads;
        req.random_seed = derive_seed(cfg.seeds.front(), kRandomScoreStream);
        rep.timings = timing_report(first.model, ds, req);
    }

    say("grid complete");
    return rep;
}

} // namespace datalens::harness
