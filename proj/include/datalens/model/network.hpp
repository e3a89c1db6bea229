#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "datalens/model/architecture.hpp"
#include "datalens/numerics/dual.hpp"

namespace datalens::model {

// Hand-written forward/backward for the fixed model family, templated on the
// scalar so the same code yields gradients (S = double) and exact
// Hessian-vector products (S = Dual, tangent seeded with the direction).
// Inputs are always plain doubles; only parameters and activations carry S.

template <class S>
struct NetWorkspace {
    // per conv block
    std::vector<std::vector<S>> conv_in;   // block input, channels x length
    std::vector<std::vector<S>> conv_pre;  // pre-ReLU conv output
    std::vector<std::vector<S>> conv_post; // post-ReLU
    std::vector<std::vector<S>> pooled;    // after maxpool (unused if !pool)
    std::vector<std::vector<int>> pool_arg;

    std::vector<S> hidden_pre;
    std::vector<S> features; // input to the final dense layer
    std::vector<S> logits;
    std::vector<S> probs;

    // backward scratch
    std::vector<S> d_logits;
    std::vector<S> d_features;
    std::vector<S> d_hidden;
    std::vector<std::vector<S>> d_conv; // gradient w.r.t. each block's input

    void resize(const ArchitectureSpec& spec, const NetworkLayout& layout) {
        const std::size_t nb = spec.conv_blocks.size();
        conv_in.resize(nb);
        conv_pre.resize(nb);
        conv_post.resize(nb);
        pooled.resize(nb);
        pool_arg.resize(nb);
        d_conv.resize(nb);
        for (std::size_t b = 0; b < nb; ++b) {
            const BlockShape& sh = layout.blocks[b];
            const int filters = spec.conv_blocks[b].filters;
            conv_in[b].resize(static_cast<std::size_t>(sh.in_channels) * sh.in_length);
            conv_pre[b].resize(static_cast<std::size_t>(filters) * sh.conv_length);
            conv_post[b].resize(conv_pre[b].size());
            if (spec.conv_blocks[b].pool) {
                pooled[b].resize(static_cast<std::size_t>(filters) * sh.out_length);
                pool_arg[b].resize(pooled[b].size());
            }
            d_conv[b].resize(conv_in[b].size());
        }
        hidden_pre.resize(spec.dense_units > 0 ? spec.dense_units : 0);
        features.resize(layout.feature_dim);
        logits.resize(spec.num_classes);
        probs.resize(spec.num_classes);
        d_logits.resize(spec.num_classes);
        d_features.resize(layout.feature_dim);
        d_hidden.resize(spec.dense_units > 0 ? spec.dense_units : 0);
    }
};

template <class S>
void net_forward(const ArchitectureSpec& spec, const NetworkLayout& layout,
                 std::span<const S> params, std::span<const double> input,
                 NetWorkspace<S>& ws) {
    const std::size_t nb = spec.conv_blocks.size();

    // stage the raw sample into the first block input (or straight to flatten)
    const S* cur = nullptr;
    if (nb > 0) {
        auto& in0 = ws.conv_in[0];
        for (std::size_t i = 0; i < in0.size(); ++i) in0[i] = S(input[i]);
    }

    for (std::size_t b = 0; b < nb; ++b) {
        const ConvBlockSpec& blk = spec.conv_blocks[b];
        const BlockShape& sh = layout.blocks[b];
        const S* w = params.data() + layout.conv[b].weight;
        const S* bias = params.data() + layout.conv[b].bias;
        const S* x = ws.conv_in[b].data();
        S* pre = ws.conv_pre[b].data();

        const int k = blk.kernel_size;
        for (int f = 0; f < blk.filters; ++f) {
            const S* wf = w + static_cast<std::size_t>(f) * sh.in_channels * k;
            S* out = pre + static_cast<std::size_t>(f) * sh.conv_length;
            for (int t = 0; t < sh.conv_length; ++t) out[t] = bias[f];
            for (int c = 0; c < sh.in_channels; ++c) {
                const S* xc = x + static_cast<std::size_t>(c) * sh.in_length;
                const S* wc = wf + static_cast<std::size_t>(c) * k;
                for (int t = 0; t < sh.conv_length; ++t) {
                    S acc = out[t];
                    for (int j = 0; j < k; ++j) acc += wc[j] * xc[t + j];
                    out[t] = acc;
                }
            }
        }

        // ReLU
        auto& post = ws.conv_post[b];
        for (std::size_t i = 0; i < post.size(); ++i)
            post[i] = numerics::value_of(pre[i]) > 0.0 ? pre[i] : S(0.0);

        const S* stage_out = post.data();
        if (blk.pool) {
            auto& pooled = ws.pooled[b];
            auto& arg = ws.pool_arg[b];
            for (int f = 0; f < blk.filters; ++f) {
                const S* z = post.data() + static_cast<std::size_t>(f) * sh.conv_length;
                for (int u = 0; u < sh.out_length; ++u) {
                    const int i0 = 2 * u, i1 = 2 * u + 1;
                    const bool first = numerics::value_of(z[i0]) >= numerics::value_of(z[i1]);
                    const int pick = first ? i0 : i1;
                    pooled[static_cast<std::size_t>(f) * sh.out_length + u] = z[pick];
                    arg[static_cast<std::size_t>(f) * sh.out_length + u] = pick;
                }
            }
            stage_out = pooled.data();
        }

        if (b + 1 < nb) {
            std::copy_n(stage_out, ws.conv_in[b + 1].size(), ws.conv_in[b + 1].data());
        } else {
            cur = stage_out;
        }
    }

    // flatten
    std::vector<S> flat_store;
    std::span<const S> flat;
    if (nb == 0) {
        flat_store.resize(layout.flatten_size);
        for (int i = 0; i < layout.flatten_size; ++i) flat_store[i] = S(input[i]);
        flat = flat_store;
    } else {
        flat = std::span<const S>(cur, static_cast<std::size_t>(layout.flatten_size));
    }

    if (spec.dense_units > 0) {
        const S* w = params.data() + layout.hidden_weight;
        const S* bias = params.data() + layout.hidden_bias;
        for (int h = 0; h < spec.dense_units; ++h) {
            S acc = bias[h];
            const S* wh = w + static_cast<std::size_t>(h) * layout.flatten_size;
            for (int i = 0; i < layout.flatten_size; ++i) acc += wh[i] * flat[i];
            ws.hidden_pre[h] = acc;
            ws.features[h] = numerics::value_of(acc) > 0.0 ? acc : S(0.0);
        }
    } else {
        std::copy_n(flat.data(), flat.size(), ws.features.data());
    }

    const S* w = params.data() + layout.output_weight;
    const S* bias = params.data() + layout.output_bias;
    for (int c = 0; c < spec.num_classes; ++c) {
        S acc = bias[c];
        const S* wc = w + static_cast<std::size_t>(c) * layout.feature_dim;
        for (int i = 0; i < layout.feature_dim; ++i) acc += wc[i] * ws.features[i];
        ws.logits[c] = acc;
    }
}

// cross-entropy of ws.logits against `label`; fills ws.probs
template <class S>
S softmax_cross_entropy(std::span<const S> logits, int label, std::span<S> probs) {
    S m = logits[0];
    for (std::size_t c = 1; c < logits.size(); ++c)
        if (numerics::value_of(logits[c]) > numerics::value_of(m)) m = logits[c];
    using std::exp;
    using std::log; // Dual overloads found via ADL
    S sum(0.0);
    for (std::size_t c = 0; c < logits.size(); ++c) {
        probs[c] = exp(logits[c] - m);
        sum += probs[c];
    }
    const S inv = S(1.0) / sum;
    for (std::size_t c = 0; c < logits.size(); ++c) probs[c] = probs[c] * inv;
    return log(sum) + m - logits[static_cast<std::size_t>(label)];
}

// Forward + cross-entropy + full backward; adds this sample's parameter
// gradient into grad (length layout.total_params). Returns the sample loss.
template <class S>
S net_loss_grad(const ArchitectureSpec& spec, const NetworkLayout& layout,
                std::span<const S> params, std::span<const double> input, int label,
                NetWorkspace<S>& ws, std::span<S> grad) {
    net_forward(spec, layout, params, input, ws);
    const S loss = softmax_cross_entropy<S>(ws.logits, label, ws.probs);

    // dL/dlogit = softmax - onehot
    for (int c = 0; c < spec.num_classes; ++c)
        ws.d_logits[c] = ws.probs[c] - S(c == label ? 1.0 : 0.0);

    // output layer
    {
        const S* w = params.data() + layout.output_weight;
        S* gw = grad.data() + layout.output_weight;
        S* gb = grad.data() + layout.output_bias;
        std::fill(ws.d_features.begin(), ws.d_features.end(), S(0.0));
        for (int c = 0; c < spec.num_classes; ++c) {
            const S d = ws.d_logits[c];
            gb[c] += d;
            const S* wc = w + static_cast<std::size_t>(c) * layout.feature_dim;
            S* gwc = gw + static_cast<std::size_t>(c) * layout.feature_dim;
            for (int i = 0; i < layout.feature_dim; ++i) {
                gwc[i] += d * ws.features[i];
                ws.d_features[i] += d * wc[i];
            }
        }
    }

    const std::size_t nb = spec.conv_blocks.size();
    std::span<S> d_flat;
    std::vector<S> d_flat_store;

    if (spec.dense_units > 0) {
        // ReLU then hidden dense
        for (int h = 0; h < spec.dense_units; ++h)
            ws.d_hidden[h] =
                numerics::value_of(ws.hidden_pre[h]) > 0.0 ? ws.d_features[h] : S(0.0);

        d_flat_store.assign(static_cast<std::size_t>(layout.flatten_size), S(0.0));
        const S* w = params.data() + layout.hidden_weight;
        S* gw = grad.data() + layout.hidden_weight;
        S* gb = grad.data() + layout.hidden_bias;

        // recover the flatten vector (last stage output or raw input)
        const S* flat = nullptr;
        std::vector<S> flat_raw;
        if (nb == 0) {
            flat_raw.resize(layout.flatten_size);
            for (int i = 0; i < layout.flatten_size; ++i) flat_raw[i] = S(input[i]);
            flat = flat_raw.data();
        } else {
            flat = spec.conv_blocks[nb - 1].pool ? ws.pooled[nb - 1].data()
                                                 : ws.conv_post[nb - 1].data();
        }
        for (int h = 0; h < spec.dense_units; ++h) {
            const S d = ws.d_hidden[h];
            gb[h] += d;
            const S* wh = w + static_cast<std::size_t>(h) * layout.flatten_size;
            S* gwh = gw + static_cast<std::size_t>(h) * layout.flatten_size;
            for (int i = 0; i < layout.flatten_size; ++i) {
                gwh[i] += d * flat[i];
                d_flat_store[i] += d * wh[i];
            }
        }
        d_flat = d_flat_store;
    } else {
        d_flat = ws.d_features;
    }

    if (nb == 0) return loss; // gradient w.r.t. raw input is not needed

    // walk the conv stack backwards; d_stage is the gradient w.r.t. the
    // block's post-(ReLU/pool) output
    std::vector<S> d_stage(d_flat.begin(), d_flat.end());
    for (std::size_t bi = nb; bi-- > 0;) {
        const ConvBlockSpec& blk = spec.conv_blocks[bi];
        const BlockShape& sh = layout.blocks[bi];

        // undo pooling: route gradient to the argmax element
        std::vector<S> d_post(static_cast<std::size_t>(blk.filters) * sh.conv_length, S(0.0));
        if (blk.pool) {
            for (int f = 0; f < blk.filters; ++f)
                for (int u = 0; u < sh.out_length; ++u) {
                    const std::size_t pi = static_cast<std::size_t>(f) * sh.out_length + u;
                    d_post[static_cast<std::size_t>(f) * sh.conv_length + ws.pool_arg[bi][pi]] +=
                        d_stage[pi];
                }
        } else {
            d_post = std::move(d_stage);
        }

        // ReLU
        const auto& pre = ws.conv_pre[bi];
        for (std::size_t i = 0; i < d_post.size(); ++i)
            if (!(numerics::value_of(pre[i]) > 0.0)) d_post[i] = S(0.0);

        // conv backward
        const S* w = params.data() + layout.conv[bi].weight;
        S* gw = grad.data() + layout.conv[bi].weight;
        S* gb = grad.data() + layout.conv[bi].bias;
        const S* x = ws.conv_in[bi].data();
        auto& dx = ws.d_conv[bi];
        std::fill(dx.begin(), dx.end(), S(0.0));

        const int k = blk.kernel_size;
        for (int f = 0; f < blk.filters; ++f) {
            const S* dy = d_post.data() + static_cast<std::size_t>(f) * sh.conv_length;
            for (int t = 0; t < sh.conv_length; ++t) gb[f] += dy[t];
            for (int c = 0; c < sh.in_channels; ++c) {
                const S* xc = x + static_cast<std::size_t>(c) * sh.in_length;
                S* dxc = dx.data() + static_cast<std::size_t>(c) * sh.in_length;
                const S* wc = w + (static_cast<std::size_t>(f) * sh.in_channels + c) * k;
                S* gwc = gw + (static_cast<std::size_t>(f) * sh.in_channels + c) * k;
                for (int t = 0; t < sh.conv_length; ++t) {
                    const S d = dy[t];
                    for (int j = 0; j < k; ++j) {
                        gwc[j] += d * xc[t + j];
                        dxc[t + j] += d * wc[j];
                    }
                }
            }
        }

        if (bi > 0) d_stage.assign(dx.begin(), dx.end());
    }
    return loss;
}

} // namespace datalens::model
