#pragma once

#include <cstdint>
#include <string_view>

#include "datalens/data/dataset.hpp"
#include "datalens/scoring/score_vector.hpp"

namespace datalens::scoring {

enum class InfluenceSolver { cg, lissa };
enum class ParameterScope { last_layer, full };
enum class ReferenceSet { validation, test, train_self };

const char* solver_name(InfluenceSolver s);
const char* scope_name(ParameterScope s);
const char* reference_name(ReferenceSet r);
InfluenceSolver solver_from_name(std::string_view name);
ParameterScope scope_from_name(std::string_view name);
ReferenceSet reference_from_name(std::string_view name);

struct InfluenceConfig {
    double damping = 0.01;
    InfluenceSolver solver = InfluenceSolver::cg;
    ParameterScope scope = ParameterScope::last_layer;
    ReferenceSet reference = ReferenceSet::validation;

    double cg_tolerance = 1e-8;
    int cg_max_iter = 1000;

    double lissa_scale = 10.0;
    int lissa_depth = 5000;
    int lissa_repeats = 10;
    int lissa_batch = 32;

    std::uint64_t seed = 0; // drives lissa sampling only
    int threads = 1;
};

// s_i = -(1/|ref|) * sum_{t in ref} grad L(z_t)^T (H + damping I)^{-1} grad L(z_i)
// with H the Hessian of the mean train loss. Negative = harmful, positive =
// helpful. With reference train_self the reference for sample i is i itself
// (one solve per sample; expensive, intended for small sets).
//
// Scope last_layer runs the whole computation on a frozen-feature view of the
// final dense layer, which keeps the Hessian effectively convex and small.
ScoreVector influence_scores(const model::ModelState& m, const data::TimeSeriesDataset& ds,
                             const InfluenceConfig& cfg);

// Same, but each train sample's reference sum is restricted to reference
// samples sharing its observed label (one solve per class). Classes missing
// from the reference set score 0 and are listed as warnings in the meta.
ScoreVector classwise_influence_scores(const model::ModelState& m,
                                       const data::TimeSeriesDataset& ds,
                                       const InfluenceConfig& cfg);

} // namespace datalens::scoring
