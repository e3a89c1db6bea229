#include "datalens/scoring/influence.hpp"

#include <algorithm>
#include <string>

#include "datalens/common/error.hpp"
#include "datalens/common/rng.hpp"
#include "datalens/common/text.hpp"
#include "datalens/model/eval.hpp"
#include "datalens/numerics/cg.hpp"
#include "datalens/numerics/derivatives.hpp"

namespace datalens::scoring {

using nlohmann::json;

const char* solver_name(InfluenceSolver s) {
    return s == InfluenceSolver::cg ? "cg" : "lissa";
}
const char* scope_name(ParameterScope s) {
    return s == ParameterScope::last_layer ? "last_layer" : "full";
}
const char* reference_name(ReferenceSet r) {
    switch (r) {
    case ReferenceSet::validation: return "validation";
    case ReferenceSet::test: return "test";
    case ReferenceSet::train_self: return "train_self";
    }
    fail(Error::Kind::internal, "unknown reference set");
}

InfluenceSolver solver_from_name(std::string_view name) {
    if (name == "cg") return InfluenceSolver::cg;
    if (name == "lissa") return InfluenceSolver::lissa;
    fail(Error::Kind::config, "unknown influence solver '" + std::string(name) + "'");
}
ParameterScope scope_from_name(std::string_view name) {
    if (name == "last_layer") return ParameterScope::last_layer;
    if (name == "full") return ParameterScope::full;
    fail(Error::Kind::config, "unknown parameter scope '" + std::string(name) + "'");
}
ReferenceSet reference_from_name(std::string_view name) {
    if (name == "validation") return ReferenceSet::validation;
    if (name == "test") return ReferenceSet::test;
    if (name == "train_self") return ReferenceSet::train_self;
    fail(Error::Kind::config, "unknown reference set '" + std::string(name) + "'");
}

namespace {

// Either the original network, or a frozen-feature view of its final dense
// layer: a degenerate architecture whose inputs are the cached Phi(x) rows
// and whose parameters are exactly the output.weight/output.bias segments.
// Influence math on that view is the last-layer-scope computation, done with
// the same kernels as the full-scope one.
struct WorkingSet {
    model::ModelState head;
    const model::ModelState* net = nullptr;
    model::FeatureMatrix train_feat;
    model::FeatureMatrix ref_feat;
    std::vector<model::TrainingExample> train_ex;
    std::vector<model::TrainingExample> ref_ex; // empty for train_self
};

model::ModelState make_head_view(const model::ModelState& m) {
    model::ArchitectureSpec arch;
    arch.input_channels = 1;
    arch.input_length = m.layout.feature_dim;
    arch.dense_units = 0;
    arch.num_classes = m.arch.num_classes;

    model::ModelState head;
    head.arch = arch;
    head.layout = model::make_layout(arch);
    head.params.values.reserve(head.layout.total_params);
    const auto w = m.params.segment_span("output.weight");
    const auto b = m.params.segment_span("output.bias");
    head.params.values.assign(w.begin(), w.end());
    head.params.values.insert(head.params.values.end(), b.begin(), b.end());
    head.params.segments = head.layout.segments;
    require(head.params.values.size() == head.layout.total_params, Error::Kind::internal,
            "frozen-feature view: segment sizes disagree with the head layout");
    return head;
}

WorkingSet build_working_set(const model::ModelState& m, const data::TimeSeriesDataset& ds,
                             const InfluenceConfig& cfg) {
    require(ds.channels == m.arch.input_channels && ds.length == m.arch.input_length &&
                ds.num_classes == m.arch.num_classes,
            Error::Kind::config, "influence: dataset shape does not match the model");

    const auto train_idx = ds.split_indices(data::Split::train);
    require(!train_idx.empty(), Error::Kind::config, "influence: empty train split");

    std::vector<std::size_t> ref_idx;
    if (cfg.reference == ReferenceSet::validation)
        ref_idx = ds.split_indices(data::Split::validation);
    else if (cfg.reference == ReferenceSet::test)
        ref_idx = ds.split_indices(data::Split::test);
    if (cfg.reference != ReferenceSet::train_self)
        require(!ref_idx.empty(), Error::Kind::config,
                "influence: reference split '" +
                    std::string(reference_name(cfg.reference)) + "' is empty");

    WorkingSet w;
    if (cfg.scope == ParameterScope::full) {
        w.net = &m;
        w.train_ex = data::make_examples(ds, train_idx);
        w.ref_ex = data::make_examples(ds, ref_idx);
        return w;
    }

    w.head = make_head_view(m);
    w.net = &w.head;
    const auto train_full = data::make_examples(ds, train_idx);
    w.train_feat = model::features(m, train_full, cfg.threads);
    w.train_ex.reserve(train_idx.size());
    for (std::size_t i = 0; i < train_idx.size(); ++i)
        w.train_ex.push_back({w.train_feat.row(i), train_full[i].label});

    if (!ref_idx.empty()) {
        const auto ref_full = data::make_examples(ds, ref_idx);
        w.ref_feat = model::features(m, ref_full, cfg.threads);
        w.ref_ex.reserve(ref_idx.size());
        for (std::size_t i = 0; i < ref_idx.size(); ++i)
            w.ref_ex.push_back({w.ref_feat.row(i), ref_full[i].label});
    }
    return w;
}

void validate_config(const InfluenceConfig& cfg) {
    require(cfg.damping >= 0.0, Error::Kind::config, "influence: damping must be >= 0");
    require(cfg.damping > 0.0 || cfg.scope == ParameterScope::last_layer,
            Error::Kind::config,
            "influence: full-scope Hessians are not positive definite; damping must be > 0");
    require(cfg.cg_tolerance > 0.0 && cfg.cg_max_iter >= 1, Error::Kind::config,
            "influence: cg_tolerance must be > 0 and cg_max_iter >= 1");
    require(cfg.lissa_scale > 0.0 && cfg.lissa_depth >= 1 && cfg.lissa_repeats >= 1 &&
                cfg.lissa_batch >= 1,
            Error::Kind::config, "influence: lissa parameters must be positive");
}

class InverseHvpSolver {
public:
    InverseHvpSolver(const WorkingSet& w, const InfluenceConfig& cfg)
        : cfg_(cfg), op_(numerics::make_hessian_operator(*w.net, w.train_ex, cfg.threads)) {
        if (cfg.solver == InfluenceSolver::lissa)
            sampler_ = numerics::make_stochastic_hvp(*w.net, w.train_ex, cfg.lissa_batch,
                                                     cfg.threads);
    }

    std::vector<double> solve(const std::vector<double>& rhs, const std::string& tag,
                              std::uint64_t solve_index, json* stats) {
        if (cfg_.solver == InfluenceSolver::cg) {
            auto r = numerics::cg_solve(op_, rhs, cfg_.damping, cfg_.cg_tolerance,
                                        cfg_.cg_max_iter);
            if (!r.converged)
                fail(Error::Kind::numeric,
                     "influence solve (" + tag + ") stopped after " +
                         std::to_string(r.iterations) + " iterations at residual " +
                         format_double(r.residual_norm) +
                         "; raise damping or cg_max_iter, or loosen cg_tolerance");
            if (stats)
                stats->push_back({{"solve", tag},
                                  {"iterations", r.iterations},
                                  {"residual", r.residual_norm}});
            return std::move(r.x);
        }
        numerics::LissaConfig lc;
        lc.damping = cfg_.damping;
        lc.scale = cfg_.lissa_scale;
        lc.depth = cfg_.lissa_depth;
        lc.repeats = cfg_.lissa_repeats;
        lc.seed = derive_seed(cfg_.seed, solve_index);
        auto x = numerics::lissa_solve(sampler_, rhs, lc);
        if (stats)
            stats->push_back({{"solve", tag},
                              {"depth", lc.depth},
                              {"repeats", lc.repeats},
                              {"scale", lc.scale}});
        return x;
    }

private:
    const InfluenceConfig& cfg_;
    numerics::LinearOperator op_;
    numerics::StochasticHvp sampler_;
};

json config_meta(const InfluenceConfig& cfg, const data::TimeSeriesDataset& ds) {
    json meta = {{"method", "influence"},
                 {"damping", cfg.damping},
                 {"solver", solver_name(cfg.solver)},
                 {"scope", scope_name(cfg.scope)},
                 {"reference", reference_name(cfg.reference)},
                 {"dataset_fingerprint", hex64(ds.fingerprint())}};
    if (cfg.solver == InfluenceSolver::cg) {
        meta["cg"] = {{"tolerance", cfg.cg_tolerance}, {"max_iter", cfg.cg_max_iter}};
    } else {
        meta["lissa"] = {{"scale", cfg.lissa_scale},
                         {"depth", cfg.lissa_depth},
                         {"repeats", cfg.lissa_repeats},
                         {"batch", cfg.lissa_batch},
                         {"seed", cfg.seed}};
    }
    return meta;
}

ScoreVector influence_impl(const model::ModelState& m, const data::TimeSeriesDataset& ds,
                           const InfluenceConfig& cfg, bool classwise) {
    validate_config(cfg);
    const WorkingSet w = build_working_set(m, ds, cfg);
    const std::size_t P = w.net->layout.total_params;
    const std::size_t n = w.train_ex.size();

    ScoreVector sv;
    sv.method = "influence";
    sv.classwise = classwise;
    sv.direction_semantics = "negative = harmful, positive = helpful";
    sv.values.assign(n, 0.0);
    sv.meta = config_meta(cfg, ds);
    sv.meta["classwise"] = classwise;
    json solves = json::array();
    json warnings = json::array();

    InverseHvpSolver solver(w, cfg);
    numerics::GradientEngine engine(*w.net);
    std::vector<double> g(P, 0.0);

    if (cfg.reference == ReferenceSet::train_self) {
        // reference = the sample itself: one solve per train sample
        if (classwise)
            warnings.push_back(
                "classwise restriction is vacuous under train_self reference");
        for (std::size_t i = 0; i < n; ++i) {
            engine.example_gradient(w.train_ex[i], g);
            const auto x = solver.solve(g, "self", i, nullptr);
            sv.values[i] = -numerics::dot(x, g);
        }
        solves.push_back({{"solve", "train_self"}, {"count", n}});
    } else if (!classwise) {
        std::vector<double> rhs(P, 0.0);
        for (const auto& ex : w.ref_ex) {
            engine.example_gradient(ex, g);
            numerics::axpy(1.0, g, rhs);
        }
        const auto x = solver.solve(rhs, "global", 0, &solves);
        const double inv_ref = 1.0 / static_cast<double>(w.ref_ex.size());
        for (std::size_t i = 0; i < n; ++i) {
            engine.example_gradient(w.train_ex[i], g);
            sv.values[i] = -numerics::dot(x, g) * inv_ref;
        }
        sv.meta["reference_count"] = w.ref_ex.size();
    } else {
        const int k = w.net->arch.num_classes;
        std::vector<std::vector<double>> rhs(static_cast<std::size_t>(k),
                                             std::vector<double>(P, 0.0));
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (const auto& ex : w.ref_ex) {
            engine.example_gradient(ex, g);
            numerics::axpy(1.0, g, rhs[static_cast<std::size_t>(ex.label)]);
            ++counts[static_cast<std::size_t>(ex.label)];
        }

        std::vector<std::vector<double>> x(static_cast<std::size_t>(k));
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] == 0) {
                warnings.push_back("reference split has no samples of class " +
                                   std::to_string(c) + "; that class scores 0");
                continue;
            }
            x[static_cast<std::size_t>(c)] =
                solver.solve(rhs[static_cast<std::size_t>(c)],
                             "class " + std::to_string(c),
                             static_cast<std::uint64_t>(c), &solves);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(w.train_ex[i].label);
            if (counts[c] == 0) continue; // scores stay 0
            engine.example_gradient(w.train_ex[i], g);
            sv.values[i] = -numerics::dot(x[c], g) / static_cast<double>(counts[c]);
        }
        json jc = json::array();
        for (std::size_t c = 0; c < counts.size(); ++c) jc.push_back(counts[c]);
        sv.meta["reference_counts"] = jc;
    }

    sv.meta["solves"] = solves;
    if (!warnings.empty()) sv.meta["warnings"] = warnings;
    sv.validate(n);
    return sv;
}

} // namespace

ScoreVector influence_scores(const model::ModelState& m, const data::TimeSeriesDataset& ds,
                             const InfluenceConfig& cfg) {
    return influence_impl(m, ds, cfg, false);
}

ScoreVector classwise_influence_scores(const model::ModelState& m,
                                       const data::TimeSeriesDataset& ds,
                                       const InfluenceConfig& cfg) {
    return influence_impl(m, ds, cfg, true);
}

} // namespace datalens::scoring
