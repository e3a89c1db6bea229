// Acceptance gate: ten end-to-end checks, one printed PASS/FAIL line each.
// These run against real training at the 4500/500/1000 anomaly scale, so the
// full binary takes several minutes; each criterion with a runtime budget
// asserts it.
#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "datalens/common/error.hpp"
#include "datalens/common/rng.hpp"
#include "datalens/data/flip.hpp"
#include "datalens/data/generate.hpp"
#include "datalens/harness/combine.hpp"
#include "datalens/harness/detection.hpp"
#include "datalens/harness/experiments.hpp"
#include "datalens/harness/ranking.hpp"
#include "datalens/model/eval.hpp"
#include "datalens/model/train.hpp"
#include "datalens/numerics/derivatives.hpp"
#include "datalens/scoring/influence.hpp"
#include "datalens/scoring/loss_scores.hpp"
#include "datalens/scoring/random_scores.hpp"
#include "datalens/scoring/representer.hpp"

using namespace datalens;
namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
        for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
        std::swap(b[col], b[pivot]);
        const double d = a[col * n + col];
        for (std::size_t c = 0; c < n; ++c) a[col * n + c] /= d;
        b[col] /= d;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r * n + col];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    return b;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// ---------------------------------------------------------------------------
// shared full-scale fixture: anomaly 4500/500/1000, 10% flips, seeds {0,1,2}

struct SeedPack {
    model::ModelState model;
    double test_accuracy = 0.0;
    double train_seconds = 0.0;
    scoring::ScoreVector loss, random, influence, classwise;
};

struct DeskFixture {
    data::TimeSeriesDataset ds;
    model::ArchitectureSpec arch;
    std::vector<std::uint8_t> mask;
    std::array<SeedPack, 3> packs;
    double build_seconds = 0.0;

    DeskFixture() {
        const auto t0 = clock_type::now();
        ds = data::generate_anomaly_dataset(4500, 500, 1000, 50, 3, 1);
        ds = data::flip_labels(ds, {0.10, 2, data::FlipMode::binary_complement});
        arch = model::default_architecture(3, 50, 2);
        mask = harness::train_flip_mask(ds);

        const auto train_ex = data::make_examples(ds, data::Split::train);
        const auto val_ex = data::make_examples(ds, data::Split::validation);
        const auto test_ex = data::make_examples(ds, data::Split::test);
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            auto& p = packs[seed];
            const auto ts = clock_type::now();
            model::TrainConfig tc;
            tc.seed = seed;
            tc.epochs = 12; // stop at the well-fit point, before flips get memorized
            p.model = model::train_model(arch, train_ex, val_ex, tc).model;
            p.train_seconds = seconds_since(ts);
            p.test_accuracy = model::accuracy(p.model, test_ex);

            p.loss = scoring::loss_scores(p.model, ds);
            p.random = scoring::random_scores(4500, derive_seed(seed, 101));
            // whole-network curvature; the head-only view loses the conv-layer
            // structure that separates flipped from merely atypical samples
            scoring::InfluenceConfig ic;
            ic.scope = scoring::ParameterScope::full;
            ic.damping = 30.0;
            ic.cg_tolerance = 1e-6;
            ic.seed = derive_seed(seed, 102);
            p.influence = scoring::influence_scores(p.model, ds, ic);
            p.classwise = scoring::classwise_influence_scores(p.model, ds, ic);
        }
        build_seconds = seconds_since(t0);
    }

    double mean_rate(const char* which, harness::Direction d, double ratio) const {
        double sum = 0.0;
        for (const auto& p : packs) {
            const scoring::ScoreVector& sv =
                std::string(which) == "loss"        ? p.loss
                : std::string(which) == "random"    ? p.random
                : std::string(which) == "influence" ? p.influence
                                                    : p.classwise;
            sum += harness::detection_rate(harness::rank(sv, d), mask, ratio);
        }
        return sum / 3.0;
    }
};

const DeskFixture& desk() {
    static DeskFixture f;
    return f;
}

// logistic-regression dataset: 10 gaussian features, class-shifted means
data::TimeSeriesDataset make_logistic_dataset() {
    Rng rng(11);
    data::TimeSeriesDataset ds;
    ds.channels = 1;
    ds.length = 10;
    ds.num_classes = 2;
    const std::size_t counts[3] = {200, 50, 10};
    const data::Split tags[3] = {data::Split::train, data::Split::validation,
                                 data::Split::test};
    for (int s = 0; s < 3; ++s) {
        for (std::size_t i = 0; i < counts[s]; ++i) {
            const int label = static_cast<int>(i % 2);
            for (int t = 0; t < 10; ++t)
                ds.values.push_back(normal(rng) + (label == 0 ? -0.4 : 0.4));
            ds.true_labels.push_back(label);
            ds.observed_labels.push_back(label);
            ds.flip_mask.push_back(0);
            ds.split.push_back(tags[s]);
        }
    }
    ds.validate();
    return ds;
}

} // namespace

// ---------------------------------------------------------------------------

TEST_CASE("criterion 01: derivative oracles across the architecture family") {
    const auto t0 = clock_type::now();

    // every layer type and combination the family offers, all under 200
    // parameters: bare linear heads, conv with/without pooling, stacked conv,
    // hidden dense, multi-channel, multi-class
    const std::vector<model::ArchitectureSpec> family{
        {1, 6, {}, 0, 3},
        {3, 8, {}, 0, 4},
        {2, 12, {{4, 3, true}}, 0, 2},
        {1, 10, {{3, 3, false}}, 4, 2},
        {1, 14, {{2, 3, true}, {3, 3, false}}, 0, 2},
        {1, 16, {{2, 5, true}}, 3, 3},
    };

    Rng rng(8);
    for (const auto& arch : family) {
        const auto m = model::init_model(arch, 21);
        const std::size_t P = m.layout.total_params;
        REQUIRE(P <= 200);

        const std::size_t stride =
            static_cast<std::size_t>(arch.input_channels) * arch.input_length;
        std::vector<double> values(12 * stride);
        for (auto& v : values) v = normal(rng);
        std::vector<model::TrainingExample> batch;
        for (std::size_t i = 0; i < 12; ++i)
            batch.push_back({std::span<const double>(values.data() + i * stride, stride),
                             static_cast<int>(i) % arch.num_classes});

        // gradient vs central finite differences of the batch loss
        std::vector<double> grad(P);
        numerics::batch_gradient(m, batch, grad);
        auto perturbed = m;
        const double hg = 1e-5;
        for (std::size_t j = 0; j < P; ++j) {
            perturbed.params.values[j] = m.params.values[j] + hg;
            const double up = numerics::batch_loss(perturbed, batch);
            perturbed.params.values[j] = m.params.values[j] - hg;
            const double dn = numerics::batch_loss(perturbed, batch);
            perturbed.params.values[j] = m.params.values[j];
            const double fd = (up - dn) / (2 * hg);
            const double denom = std::max({std::abs(fd), std::abs(grad[j]), 1e-8});
            REQUIRE(std::abs(grad[j] - fd) / denom <= 1e-4);
        }

        // hvp vs finite differences of gradients
        std::vector<double> v(P);
        for (auto& x : v) x = normal(rng);
        const auto hv = numerics::batch_hvp(m, batch, v);
        const double hh = 1e-4;
        std::vector<double> gp(P), gm(P);
        for (std::size_t j = 0; j < P; ++j)
            perturbed.params.values[j] = m.params.values[j] + hh * v[j];
        numerics::batch_gradient(perturbed, batch, gp);
        for (std::size_t j = 0; j < P; ++j)
            perturbed.params.values[j] = m.params.values[j] - hh * v[j];
        numerics::batch_gradient(perturbed, batch, gm);
        std::vector<double> fd_hv(P);
        for (std::size_t j = 0; j < P; ++j) fd_hv[j] = (gp[j] - gm[j]) / (2 * hh);
        REQUIRE(rel_l2(hv, fd_hv) <= 1e-3);
    }

    CHECK(seconds_since(t0) < 60.0);
}

TEST_CASE("criterion 02: influence solvers against a dense inverse on logistic regression") {
    const auto t0 = clock_type::now();
    const auto ds = make_logistic_dataset();
    const model::ArchitectureSpec arch{1, 10, {}, 0, 2};
    model::TrainConfig tc;
    tc.epochs = 20;
    tc.batch_size = 32;
    tc.seed = 2;
    const auto m = model::train_model(arch, data::make_examples(ds, data::Split::train),
                                      data::make_examples(ds, data::Split::validation), tc)
                       .model;

    scoring::InfluenceConfig cfg;
    cfg.damping = 0.01;
    cfg.scope = scoring::ParameterScope::full; // the model is its own final layer
    cfg.cg_tolerance = 1e-12;
    const auto cg = scoring::influence_scores(m, ds, cfg);

    // explicit dense (H + damping I)^{-1} on the aggregated reference gradient
    const auto train_ex = data::make_examples(ds, data::Split::train);
    const auto ref_ex = data::make_examples(ds, data::Split::validation);
    const std::size_t P = m.layout.total_params;
    std::vector<double> h(P * P), e(P, 0.0);
    for (std::size_t j = 0; j < P; ++j) {
        e[j] = 1.0;
        const auto col = numerics::batch_hvp(m, train_ex, e);
        for (std::size_t r = 0; r < P; ++r) h[r * P + j] = col[r];
        h[j * P + j] += cfg.damping;
        e[j] = 0.0;
    }
    numerics::GradientEngine engine(m);
    std::vector<double> g(P), rhs(P, 0.0);
    for (const auto& ex : ref_ex) {
        engine.example_gradient(ex, g);
        for (std::size_t j = 0; j < P; ++j) rhs[j] += g[j];
    }
    const auto x = dense_solve(h, rhs);
    std::vector<double> expected(train_ex.size());
    for (std::size_t i = 0; i < train_ex.size(); ++i) {
        engine.example_gradient(train_ex[i], g);
        expected[i] = -dot(x, g) / static_cast<double>(ref_ex.size());
    }
    CHECK(rel_l2(cg.values, expected) <= 1e-5);

    cfg.solver = scoring::InfluenceSolver::lissa;
    cfg.lissa_scale = 5.0;
    cfg.lissa_depth = 5000;
    cfg.lissa_repeats = 24;
    cfg.lissa_batch = 64;
    cfg.seed = 1;
    const auto ls = scoring::influence_scores(m, ds, cfg);
    CHECK(rel_l2(ls.values, cg.values) <= 0.05);

    CHECK(seconds_since(t0) < 60.0);
}

TEST_CASE("criterion 03: representer decomposition residual on 100 probes") {
    const auto t0 = clock_type::now();
    const auto& f = desk();
    const auto& m = f.packs[0].model;

    scoring::RepresenterConfig cfg;
    cfg.tolerance = 1e-8; // comfortably past the 1e-6 requirement
    const auto own_start = clock_type::now();
    const auto res = scoring::representer_analysis(m, f.ds, cfg);
    CHECK(res.grad_norm <= 1e-6);

    const auto train_ex = data::make_examples(f.ds, data::Split::train);
    auto test_ex = data::make_examples(f.ds, data::Split::test);
    test_ex.resize(100);
    const auto phi = model::features(m, train_ex);
    const auto phi_t = model::features(m, test_ex);
    const std::size_t n = train_ex.size(), d = phi.cols, k = 2;

    for (std::size_t t = 0; t < 100; ++t) {
        for (std::size_t c = 0; c < k; ++c) {
            double direct = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                direct += res.weights[c * d + j] * phi_t.row(t)[j];
            double expansion = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double kij = 0.0;
                for (std::size_t j = 0; j < d; ++j)
                    kij += phi.row(i)[j] * phi_t.row(t)[j];
                expansion += res.alphas[i * k + c] * kij;
            }
            // relative residual with an absolute floor for near-zero logits
            REQUIRE(std::abs(direct - expansion) / (1.0 + std::abs(direct)) <= 1e-3);
        }
    }

    // budget: one training plus the refit and probe sweep
    CHECK(f.packs[0].train_seconds + seconds_since(own_start) < 300.0);
    (void)t0;
}

TEST_CASE("criterion 04: detection bands at 10% flips over seeds {0,1,2}") {
    const auto t0 = clock_type::now();
    const auto& f = desk();

    for (const auto& p : f.packs) // the task is learnable despite the flips
        CHECK(p.test_accuracy >= 0.80);

    const double loss10 = f.mean_rate("loss", harness::Direction::high_first, 0.10);
    const double rand10 = f.mean_rate("random", harness::Direction::high_first, 0.10);
    const double rand25 = f.mean_rate("random", harness::Direction::high_first, 0.25);
    const double infabs25 =
        f.mean_rate("influence", harness::Direction::absolute_high_first, 0.25);

    CHECK(loss10 >= 0.80);
    CHECK(rand10 >= 0.07);
    CHECK(rand10 <= 0.13);
    CHECK(infabs25 >= 2.0 * rand25);

    CHECK(f.build_seconds + seconds_since(t0) < 1800.0);
}

TEST_CASE("criterion 05: 50% flips collapse the loss ranking") {
    auto ds = data::generate_anomaly_dataset(4500, 500, 1000, 50, 3, 1);
    ds = data::flip_labels(ds, {0.50, 2, data::FlipMode::binary_complement});
    const auto arch = model::default_architecture(3, 50, 2);

    model::TrainConfig tc;
    tc.seed = 0;
    tc.epochs = 12;
    const auto m = model::train_model(arch, data::make_examples(ds, data::Split::train),
                                      data::make_examples(ds, data::Split::validation), tc)
                       .model;
    const double acc = model::accuracy(m, data::make_examples(ds, data::Split::test));
    CHECK(acc <= 0.65);

    const auto mask = harness::train_flip_mask(ds);
    const auto loss = scoring::loss_scores(m, ds);
    const auto rnd = scoring::random_scores(4500, derive_seed(0, 101));
    const double loss10 = harness::detection_rate(
        harness::rank(loss, harness::Direction::high_first), mask, 0.10);
    const double rand10 = harness::detection_rate(
        harness::rank(rnd, harness::Direction::high_first), mask, 0.10);
    CHECK(loss10 <= rand10 + 0.10);
}

TEST_CASE("criterion 06: curve monotonicity, nested prefixes, transform invariance") {
    Rng rng(55);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 5 + uniform_int(rng, 0, 55);
        std::vector<double> scores(n);
        for (auto& s : scores) s = normal(rng);
        std::vector<std::uint8_t> mask(n, 0);
        const std::size_t n_flips = 1 + uniform_int(rng, 0, static_cast<int>(n) - 1);
        for (std::size_t i = 0; i < n_flips; ++i) mask[i] = 1;
        shuffle(mask, rng);
        std::vector<double> ratios{0.05 + 0.3 * u01(rng), 0.5, 0.6 + 0.3 * u01(rng), 1.0};
        std::sort(ratios.begin(), ratios.end());

        const auto ranking = harness::rank(scores, harness::Direction::high_first);
        const auto curve = harness::inspection_curve(ranking, mask, ratios);
        for (std::size_t i = 0; i < curve.size(); ++i) {
            if (i > 0) REQUIRE(curve[i].rate >= curve[i - 1].rate);
            // nested prefixes: the one-shot rate is exactly the curve value
            REQUIRE(curve[i].rate == harness::detection_rate(ranking, mask, ratios[i]));
        }
        REQUIRE(curve.back().rate == 1.0);

        std::vector<double> warped(n);
        for (std::size_t i = 0; i < n; ++i) warped[i] = std::exp(2.0 * scores[i]) + 5.0;
        REQUIRE(harness::rank(warped, harness::Direction::high_first) == ranking);
        for (double r : ratios)
            REQUIRE(harness::detection_rate(
                        harness::rank(warped, harness::Direction::high_first), mask, r) ==
                    harness::detection_rate(ranking, mask, r));
    }
}

TEST_CASE("criterion 07: combinations preserve and do not degrade detection") {
    // one-hot weights reproduce the constituent ranking exactly
    Rng rng(13);
    std::vector<double> a(200), b(200);
    for (auto& v : a) v = normal(rng);
    for (auto& v : b) v = normal(rng);
    scoring::ScoreVector sa, sb;
    sa.method = "a";
    sa.values = a;
    sb.method = "b";
    sb.values = b;
    const std::vector<harness::CombineInput> onehot{
        {&sa, harness::Direction::low_first, 1.0},
        {&sb, harness::Direction::high_first, 0.0},
    };
    CHECK(harness::rank(harness::combine(onehot), harness::Direction::high_first) ==
          harness::rank(sa, harness::Direction::low_first));

    // equal-weight loss + classwise-low stays within one point of loss alone
    const auto& f = desk();
    double combo10 = 0.0;
    for (const auto& p : f.packs) {
        const std::vector<harness::CombineInput> inputs{
            {&p.loss, harness::Direction::high_first, 0.5},
            {&p.classwise, harness::Direction::low_first, 0.5},
        };
        const auto combined = harness::combine(inputs);
        combo10 += harness::detection_rate(
            harness::rank(combined, harness::Direction::high_first), f.mask, 0.10);
    }
    combo10 /= 3.0;
    const double loss10 = f.mean_rate("loss", harness::Direction::high_first, 0.10);
    CHECK(combo10 >= loss10 - 0.01);
}

TEST_CASE("criterion 08: correcting inspected labels beats deleting them") {
    const auto& f = desk();
    model::TrainConfig tc; // same regimen as the fixture models
    tc.seed = 0;
    tc.epochs = 12;

    const auto ranking = harness::rank(f.packs[0].loss, harness::Direction::high_first);
    const auto corr =
        harness::correction_experiment(f.ds, ranking, 0.10, f.arch, tc, 10);
    const auto del = harness::deletion_experiment(f.ds, ranking, 0.10, f.arch, tc, 10,
                                                  &corr.baseline);

    CHECK(corr.treated.accuracies.size() == 10);
    CHECK(del.treated.accuracies.size() == 10);
    CHECK(corr.treated.mean >= del.treated.mean - 0.01);
}

TEST_CASE("criterion 09: timing order of the scorers on a 20-class task") {
    const auto ds = data::generate_multiclass_dataset(2000, 400, 400, 50, 3, 20, 3);
    const auto arch = model::default_architecture(3, 50, 20);
    model::TrainConfig tc;
    tc.epochs = 10;
    tc.seed = 0;
    const auto m = model::train_model(arch, data::make_examples(ds, data::Split::train),
                                      data::make_examples(ds, data::Split::validation), tc)
                       .model;

    harness::TimingRequest req;
    req.methods = {"influence", "classwise_influence", "representer"};
    const auto entries = harness::timing_report(m, ds, req);
    REQUIRE(entries.size() == 3);
    const double influence_s = entries[0].seconds;
    const double classwise_s = entries[1].seconds;
    const double representer_s = entries[2].seconds;

    CHECK(classwise_s > influence_s);   // one solve per class vs one global solve
    CHECK(representer_s < influence_s); // a head-only refit is the cheapest
}

TEST_CASE("criterion 10: identical configs give byte-identical non-timing outputs") {
    const fs::path root = fs::temp_directory_path() / "datalens_acceptance_rerun";
    fs::remove_all(root);
    fs::create_directories(root);

    const nlohmann::json grid{
        {"dataset",
         {{"kind", "anomaly"},
          {"n_train", 200},
          {"n_val", 40},
          {"n_test", 40},
          {"length", 50},
          {"channels", 3},
          {"seed", 1}}},
        {"flip", {{"rate", 0.1}, {"seed", 2}}},
        {"train", {{"epochs", 3}, {"batch_size", 32}}},
        {"methods", {"loss", "random", "influence", "classwise_influence", "representer"}},
        {"ratios", {0.1, 0.25, 0.5}},
        {"seeds", {0, 1}},
        {"repeats", 2},
        {"combinations", {"loss+classwise_low"}},
        {"diff", {{"ratio", 0.25}}},
        {"correction", {{"column", "loss"}, {"ratio", 0.1}}},
        {"deletion", {{"column", "loss"}, {"ratio", 0.1}}},
        {"timing", true},
    };
    {
        std::ofstream cfg(root / "grid.json");
        cfg << grid.dump(2) << '\n';
    }

    auto run = [&](const char* out) {
        const std::string cmd = std::string(DATALENS_CLI_PATH) + " evaluate --config " +
                                (root / "grid.json").string() + " --out " +
                                (root / out).string() + " >/dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    REQUIRE(run("a") == 0);
    REQUIRE(run("b") == 0);

    auto tree = [&](const char* out) {
        std::map<std::string, std::string> files;
        for (const auto& entry : fs::recursive_directory_iterator(root / out)) {
            if (!entry.is_regular_file()) continue;
            const auto rel = fs::relative(entry.path(), root / out).generic_string();
            std::ifstream in(entry.path(), std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            files[rel] = ss.str();
        }
        return files;
    };
    const auto a = tree("a");
    const auto b = tree("b");
    REQUIRE(a.size() == b.size());
    REQUIRE(a.size() > 20); // the full artifact tree, not a stub

    for (const auto& [rel, content] : a) {
        REQUIRE(b.count(rel) == 1);
        if (rel == "timing.csv") continue; // wall time, excluded by contract
        if (rel == "run_manifest.json") {
            auto ja = nlohmann::json::parse(content);
            auto jb = nlohmann::json::parse(b.at(rel));
            ja.erase("timings");
            jb.erase("timings");
            REQUIRE(ja.dump() == jb.dump());
            continue;
        }
        REQUIRE_MESSAGE(content == b.at(rel), rel);
    }
    fs::remove_all(root);
}

// ---------------------------------------------------------------------------
// reporter: one line per criterion

namespace {

struct AcceptancePrinter : doctest::IReporter {
    const doctest::TestCaseData* current = nullptr;

    explicit AcceptancePrinter(const doctest::ContextOptions&) {}

    void report_query(const doctest::QueryData&) override {}
    void test_run_start() override {}
    void test_run_end(const doctest::TestRunStats&) override {}
    void test_case_start(const doctest::TestCaseData& d) override { current = &d; }
    void test_case_reenter(const doctest::TestCaseData&) override {}
    void test_case_end(const doctest::CurrentTestCaseStats& s) override {
        std::printf("%s: %s\n", current->m_name,
                    s.failure_flags == 0 ? "PASS" : "FAIL");
        std::fflush(stdout);
    }
    void test_case_exception(const doctest::TestCaseException&) override {}
    void subcase_start(const doctest::SubcaseSignature&) override {}
    void subcase_end() override {}
    void log_assert(const doctest::AssertData&) override {}
    void log_message(const doctest::MessageData&) override {}
    void test_case_skipped(const doctest::TestCaseData&) override {}
};

REGISTER_LISTENER("acceptance", 1, AcceptancePrinter);

} // namespace

int main(int argc, char** argv) {
    doctest::Context ctx(argc, argv);
    return ctx.run();
}
