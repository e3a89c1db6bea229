#include "datalens/scoring/representer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "datalens/common/error.hpp"
#include "datalens/common/text.hpp"
#include "datalens/model/eval.hpp"
#include "datalens/numerics/cg.hpp"
#include "datalens/numerics/param_vector.hpp"

namespace datalens::scoring {

using nlohmann::json;

namespace {

// Refit state over frozen features: W is k x d row-major, rows per class.
// Gradient and Hessian of J(W) = mean CE + lambda ||W||_F^2 have closed forms
// in the per-sample probabilities, so the refit never touches the network.
struct RefitProblem {
    const model::FeatureMatrix* feat = nullptr;
    const std::vector<int>* labels = nullptr;
    int k = 0;
    std::size_t d = 0;
    double lambda = 0.0;

    std::size_t n() const { return feat->rows; }
    std::size_t dim() const { return static_cast<std::size_t>(k) * d; }

    // fills probs (n x k row-major), returns J(W)
    double forward(const std::vector<double>& W, std::vector<double>& probs) const {
        const std::size_t nn = n();
        probs.assign(nn * static_cast<std::size_t>(k), 0.0);
        double ce = 0.0;
        std::vector<double> logits(static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < nn; ++i) {
            const auto phi = feat->row(i);
            for (int c = 0; c < k; ++c) {
                const double* wc = W.data() + static_cast<std::size_t>(c) * d;
                double acc = 0.0;
                for (std::size_t j = 0; j < d; ++j) acc += wc[j] * phi[j];
                logits[static_cast<std::size_t>(c)] = acc;
            }
            const double m = *std::max_element(logits.begin(), logits.end());
            double sum = 0.0;
            for (int c = 0; c < k; ++c) {
                const double e = std::exp(logits[static_cast<std::size_t>(c)] - m);
                probs[i * k + static_cast<std::size_t>(c)] = e;
                sum += e;
            }
            for (int c = 0; c < k; ++c) probs[i * k + static_cast<std::size_t>(c)] /= sum;
            ce += std::log(sum) + m - logits[static_cast<std::size_t>((*labels)[i])];
        }
        double reg = 0.0;
        for (double w : W) reg += w * w;
        const double obj = ce / static_cast<double>(nn) + lambda * reg;
        require(std::isfinite(obj), Error::Kind::numeric,
                "representer refit: non-finite objective");
        return obj;
    }

    // gradient at W given its probs
    std::vector<double> gradient(const std::vector<double>& W,
                                 const std::vector<double>& probs) const {
        std::vector<double> G(dim(), 0.0);
        const std::size_t nn = n();
        for (std::size_t i = 0; i < nn; ++i) {
            const auto phi = feat->row(i);
            for (int c = 0; c < k; ++c) {
                const double coef =
                    probs[i * k + static_cast<std::size_t>(c)] -
                    (c == (*labels)[i] ? 1.0 : 0.0);
                double* gc = G.data() + static_cast<std::size_t>(c) * d;
                for (std::size_t j = 0; j < d; ++j) gc[j] += coef * phi[j];
            }
        }
        const double inv_n = 1.0 / static_cast<double>(nn);
        for (std::size_t t = 0; t < G.size(); ++t) G[t] = G[t] * inv_n + 2.0 * lambda * W[t];
        return G;
    }

    // exact Hessian-vector product at the W whose probs are given
    std::vector<double> hvp(const std::vector<double>& probs,
                            const std::vector<double>& V) const {
        std::vector<double> H(dim(), 0.0);
        const std::size_t nn = n();
        std::vector<double> u(static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < nn; ++i) {
            const auto phi = feat->row(i);
            const double* p = probs.data() + i * k;
            double s = 0.0;
            for (int c = 0; c < k; ++c) {
                const double* vc = V.data() + static_cast<std::size_t>(c) * d;
                double acc = 0.0;
                for (std::size_t j = 0; j < d; ++j) acc += vc[j] * phi[j];
                u[static_cast<std::size_t>(c)] = acc;
                s += p[c] * acc;
            }
            for (int c = 0; c < k; ++c) {
                const double coef = p[c] * (u[static_cast<std::size_t>(c)] - s);
                double* hc = H.data() + static_cast<std::size_t>(c) * d;
                for (std::size_t j = 0; j < d; ++j) hc[j] += coef * phi[j];
            }
        }
        const double inv_n = 1.0 / static_cast<double>(nn);
        for (std::size_t t = 0; t < H.size(); ++t) H[t] = H[t] * inv_n + 2.0 * lambda * V[t];
        return H;
    }
};

} // namespace

RepresenterResult representer_analysis(const model::ModelState& m,
                                       const data::TimeSeriesDataset& ds,
                                       const RepresenterConfig& cfg) {
    require(cfg.lambda > 0.0, Error::Kind::config, "representer: lambda must be > 0");
    require(cfg.tolerance > 0.0, Error::Kind::config, "representer: tolerance must be > 0");
    require(cfg.max_steps >= 1, Error::Kind::config, "representer: max_steps must be >= 1");
    require(ds.channels == m.arch.input_channels && ds.length == m.arch.input_length &&
                ds.num_classes == m.arch.num_classes,
            Error::Kind::config, "representer: dataset shape does not match the model");

    const auto train = data::make_examples(ds, data::Split::train);
    require(!train.empty(), Error::Kind::config, "representer: empty train split");

    const model::FeatureMatrix feat = model::features(m, train, cfg.threads);
    std::vector<int> labels(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) labels[i] = train[i].label;

    RefitProblem prob;
    prob.feat = &feat;
    prob.labels = &labels;
    prob.k = m.arch.num_classes;
    prob.d = feat.cols;
    prob.lambda = cfg.lambda;

    // warm start from the trained head (its bias is dropped; the refit
    // problem has none so the decomposition identity holds exactly)
    const auto w0 = m.params.segment_span("output.weight");
    std::vector<double> W(w0.begin(), w0.end());
    require(W.size() == prob.dim(), Error::Kind::internal,
            "representer: head weight segment size mismatch");

    std::vector<double> probs;
    double obj = prob.forward(W, probs);
    double grad_norm = 0.0;
    int steps = 0;
    bool converged = false;

    for (; steps < cfg.max_steps; ++steps) {
        const std::vector<double> G = prob.gradient(W, probs);
        grad_norm = numerics::norm2(G);
        if (grad_norm <= cfg.tolerance) {
            converged = true;
            break;
        }

        // Newton direction (Hessian is PD thanks to the 2*lambda*I term);
        // inner tolerance follows the gradient norm so early steps stay cheap
        numerics::LinearOperator op;
        op.dimension = prob.dim();
        op.apply = [&prob, &probs](const std::vector<double>& v) {
            return prob.hvp(probs, v);
        };
        const double inner_tol = std::min(0.1, std::sqrt(grad_norm));
        const auto cgres = numerics::cg_solve(op, G, 0.0, inner_tol, 200);
        const std::vector<double>& dir = cgres.x;

        const double gd = numerics::dot(G, dir);
        require(gd > 0.0, Error::Kind::numeric,
                "representer refit: Newton direction is not a descent direction");

        double t = 1.0;
        bool accepted = false;
        std::vector<double> W_try(W.size());
        std::vector<double> probs_try;
        for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
            for (std::size_t j = 0; j < W.size(); ++j) W_try[j] = W[j] - t * dir[j];
            const double obj_try = prob.forward(W_try, probs_try);
            if (obj_try <= obj - 1e-4 * t * gd) {
                W.swap(W_try);
                probs.swap(probs_try);
                obj = obj_try;
                accepted = true;
                break;
            }
        }
        require(accepted, Error::Kind::numeric,
                "representer refit: line search failed at gradient norm " +
                    format_double(grad_norm));
    }

    if (!converged) {
        // the loop ran out; recompute the norm it ended on for the report
        grad_norm = numerics::norm2(prob.gradient(W, probs));
        converged = grad_norm <= cfg.tolerance;
    }
    if (!converged)
        fail(Error::Kind::numeric,
             "representer refit did not reach gradient norm " +
                 format_double(cfg.tolerance) + " in " + std::to_string(cfg.max_steps) +
                 " steps; final gradient norm " + format_double(grad_norm));

    const std::size_t n = train.size();
    const int k = prob.k;
    const double scale = -1.0 / (2.0 * cfg.lambda * static_cast<double>(n));

    RepresenterResult res;
    res.weights = std::move(W);
    res.alphas.assign(n * static_cast<std::size_t>(k), 0.0);
    res.grad_norm = grad_norm;
    res.newton_steps = steps;
    for (std::size_t i = 0; i < n; ++i)
        for (int c = 0; c < k; ++c) {
            const double coef = probs[i * k + static_cast<std::size_t>(c)] -
                                (c == labels[i] ? 1.0 : 0.0);
            res.alphas[i * k + static_cast<std::size_t>(c)] = scale * coef;
        }

    res.scores.method = "representer";
    res.scores.direction_semantics = "low = inhibitory, high = excitatory";
    res.scores.values.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        res.scores.values[i] =
            res.alphas[i * k + static_cast<std::size_t>(labels[i])];
    res.scores.meta = {{"method", "representer"},
                       {"lambda", cfg.lambda},
                       {"tolerance", cfg.tolerance},
                       {"max_steps", cfg.max_steps},
                       {"newton_steps", steps},
                       {"grad_norm", grad_norm},
                       {"feature_dim", feat.cols},
                       {"dataset_fingerprint", hex64(ds.fingerprint())}};
    res.scores.validate(n);
    return res;
}

ScoreVector representer_scores(const model::ModelState& m,
                               const data::TimeSeriesDataset& ds,
                               const RepresenterConfig& cfg) {
    return representer_analysis(m, ds, cfg).scores;
}

} // namespace datalens::scoring
