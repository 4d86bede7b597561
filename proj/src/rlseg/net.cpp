#include "rlseg/net.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "rlseg/rng.hpp"

namespace rlseg {

namespace {

inline int mirror(int i, int n) {
    if (n == 1) return 0;
    if (i < 0) return -i;
    if (i >= n) return 2 * n - 2 - i;
    return i;
}

std::string layer_tag(int index, const LayerSpec& spec) {
    static const char* names[] = {"conv", "relu", "maxpool", "deconv", "skip_concat",
                                  "logistic_head"};
    return "layer " + std::to_string(index) + " (" + names[static_cast<int>(spec.kind)] + ")";
}

[[noreturn]] void shape_fail(int index, const LayerSpec& spec, const std::string& detail) {
    throw ShapeError(layer_tag(index, spec) + ": " + detail);
}

double sigmoid(double z) {
    z = std::clamp(z, -36.0, 36.0); // keeps the output strictly inside (0,1)
    return 1.0 / (1.0 + std::exp(-z));
}

// Cross-correlation with mirror padding; spatial size is preserved before
// the stride. Inner loops run contiguously over x away from the borders.
Tensor3D conv_forward(const Tensor3D& in, int out_channels, int kernel, int stride,
                      const LayerParams& p, int index, const LayerSpec& spec) {
    const int k = kernel, pad = k / 2, s = stride;
    if (in.height % s != 0 || in.width % s != 0)
        shape_fail(index, spec,
                   "input " + std::to_string(in.width) + "x" + std::to_string(in.height) +
                       " not divisible by stride " + std::to_string(s));
    if (pad > in.height - 1 || pad > in.width - 1)
        shape_fail(index, spec, "kernel larger than input");
    const int ho = in.height / s, wo = in.width / s;
    Tensor3D out(out_channels, ho, wo);
    for (int oc = 0; oc < out_channels; ++oc) {
        const double bias = p.b[static_cast<std::size_t>(oc)];
        double* base = out.row(oc, 0);
        std::fill(base, base + static_cast<std::size_t>(ho) * wo, bias);
    }
    for (int oc = 0; oc < out_channels; ++oc) {
        for (int ic = 0; ic < in.channels; ++ic) {
            for (int ky = 0; ky < k; ++ky) {
                for (int kx = 0; kx < k; ++kx) {
                    const double w =
                        p.w[((static_cast<std::size_t>(oc) * in.channels + ic) * k + ky) * k + kx];
                    if (w == 0.0) continue;
                    for (int yo = 0; yo < ho; ++yo) {
                        const int iy = mirror(yo * s + ky - pad, in.height);
                        const double* src = in.row(ic, iy);
                        double* dst = out.row(oc, yo);
                        if (s == 1) {
                            const int dx = kx - pad;
                            const int xlo = std::max(0, -dx);
                            const int xhi = std::min(wo, in.width - dx);
                            for (int x = 0; x < xlo; ++x) dst[x] += w * src[mirror(x + dx, in.width)];
                            for (int x = xlo; x < xhi; ++x) dst[x] += w * src[x + dx];
                            for (int x = xhi; x < wo; ++x) dst[x] += w * src[mirror(x + dx, in.width)];
                        } else {
                            for (int xo = 0; xo < wo; ++xo)
                                dst[xo] += w * src[mirror(xo * s + kx - pad, in.width)];
                        }
                    }
                }
            }
        }
    }
    return out;
}

void conv_backward(const Tensor3D& in, const Tensor3D& gout, int kernel, int stride,
                   const LayerParams& p, LayerParams& gp, Tensor3D& gin) {
    const int k = kernel, pad = k / 2, s = stride;
    const int ho = gout.height, wo = gout.width;
    for (int oc = 0; oc < gout.channels; ++oc) {
        double gb = 0.0;
        const double* g = gout.row(oc, 0);
        for (std::size_t i = 0; i < static_cast<std::size_t>(ho) * wo; ++i) gb += g[i];
        gp.b[static_cast<std::size_t>(oc)] += gb;
    }
    for (int oc = 0; oc < gout.channels; ++oc) {
        for (int ic = 0; ic < in.channels; ++ic) {
            for (int ky = 0; ky < k; ++ky) {
                for (int kx = 0; kx < k; ++kx) {
                    const std::size_t wi =
                        ((static_cast<std::size_t>(oc) * in.channels + ic) * k + ky) * k + kx;
                    const double w = p.w[wi];
                    double gw = 0.0;
                    for (int yo = 0; yo < ho; ++yo) {
                        const int iy = mirror(yo * s + ky - pad, in.height);
                        const double* src = in.row(ic, iy);
                        const double* g = gout.row(oc, yo);
                        double* gi = gin.row(ic, iy);
                        if (s == 1) {
                            const int dx = kx - pad;
                            const int xlo = std::max(0, -dx);
                            const int xhi = std::min(wo, in.width - dx);
                            for (int x = 0; x < xlo; ++x) {
                                const int ix = mirror(x + dx, in.width);
                                gw += g[x] * src[ix];
                                gi[ix] += w * g[x];
                            }
                            for (int x = xlo; x < xhi; ++x) {
                                gw += g[x] * src[x + dx];
                                gi[x + dx] += w * g[x];
                            }
                            for (int x = xhi; x < wo; ++x) {
                                const int ix = mirror(x + dx, in.width);
                                gw += g[x] * src[ix];
                                gi[ix] += w * g[x];
                            }
                        } else {
                            for (int xo = 0; xo < wo; ++xo) {
                                const int ix = mirror(xo * s + kx - pad, in.width);
                                gw += g[xo] * src[ix];
                                gi[ix] += w * g[xo];
                            }
                        }
                    }
                    gp.w[wi] += gw;
                }
            }
        }
    }
}

} // namespace

std::vector<LayerSpec> resolve_structure(std::vector<LayerSpec> layers) {
    if (layers.empty()) throw ConfigError("network needs at least one layer");
    std::vector<int> open_pools;
    std::vector<bool> consumed(layers.size(), false);
    for (std::size_t i = 0; i < layers.size(); ++i) {
        LayerSpec& l = layers[i];
        switch (l.kind) {
        case LayerKind::conv:
            if (l.out_channels < 1) shape_fail(static_cast<int>(i), l, "out_channels must be >= 1");
            if (l.kernel < 1 || l.kernel % 2 == 0)
                shape_fail(static_cast<int>(i), l, "kernel must be odd and >= 1");
            if (l.stride < 1) shape_fail(static_cast<int>(i), l, "stride must be >= 1");
            break;
        case LayerKind::relu:
        case LayerKind::maxpool:
            if (l.kind == LayerKind::maxpool) open_pools.push_back(static_cast<int>(i));
            break;
        case LayerKind::deconv:
            if (l.out_channels < 1) shape_fail(static_cast<int>(i), l, "out_channels must be >= 1");
            if (l.kernel < 1 || l.kernel % 2 == 0)
                shape_fail(static_cast<int>(i), l, "kernel must be odd and >= 1");
            if (l.pool_source < 0) {
                if (open_pools.empty())
                    shape_fail(static_cast<int>(i), l, "no unconsumed maxpool to unpool from");
                l.pool_source = open_pools.back();
                open_pools.pop_back();
            } else {
                if (l.pool_source >= static_cast<int>(i) ||
                    layers[static_cast<std::size_t>(l.pool_source)].kind != LayerKind::maxpool)
                    shape_fail(static_cast<int>(i), l, "pool_source must be an earlier maxpool");
                if (consumed[static_cast<std::size_t>(l.pool_source)])
                    shape_fail(static_cast<int>(i), l, "pool_source already consumed");
                std::erase(open_pools, l.pool_source);
            }
            consumed[static_cast<std::size_t>(l.pool_source)] = true;
            break;
        case LayerKind::skip_concat:
            if (l.skip_source < 0 || l.skip_source >= static_cast<int>(i))
                shape_fail(static_cast<int>(i), l, "skip source must be an earlier layer");
            break;
        case LayerKind::logistic_head:
            l.out_channels = 1;
            break;
        }
    }
    return layers;
}

std::vector<int> infer_channels(const std::vector<LayerSpec>& layers, int in_channels) {
    std::vector<int> ch(layers.size());
    int cur = in_channels;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& l = layers[i];
        switch (l.kind) {
        case LayerKind::conv:
        case LayerKind::deconv:
            if (l.kind == LayerKind::deconv) {
                const int pool_ch = ch[static_cast<std::size_t>(l.pool_source)];
                if (pool_ch != cur)
                    shape_fail(static_cast<int>(i), l,
                               "channels " + std::to_string(cur) + " do not match paired pool (" +
                                   std::to_string(pool_ch) + ")");
            }
            cur = l.out_channels;
            break;
        case LayerKind::relu:
        case LayerKind::maxpool:
            break;
        case LayerKind::skip_concat:
            cur += ch[static_cast<std::size_t>(l.skip_source)];
            break;
        case LayerKind::logistic_head:
            cur = 1;
            break;
        }
        ch[i] = cur;
    }
    return ch;
}

NetworkParams init_params(const std::vector<LayerSpec>& layers, int in_channels,
                          std::uint64_t seed) {
    const std::vector<int> ch = infer_channels(layers, in_channels);
    Rng rng(seed);
    NetworkParams params;
    params.layers.resize(layers.size());
    int cur = in_channels;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& l = layers[i];
        LayerParams& p = params.layers[i];
        if (l.kind == LayerKind::conv || l.kind == LayerKind::deconv) {
            const int k = l.kernel;
            const double fan_in = static_cast<double>(cur) * k * k;
            const double fan_out = static_cast<double>(l.out_channels) * k * k;
            const double a = std::sqrt(6.0 / (fan_in + fan_out));
            p.w.resize(static_cast<std::size_t>(l.out_channels) * cur * k * k);
            for (double& w : p.w) w = rng.uniform(-a, a);
            p.b.assign(static_cast<std::size_t>(l.out_channels), 0.0);
        } else if (l.kind == LayerKind::logistic_head) {
            const double a = std::sqrt(6.0 / (cur + 1.0));
            p.w.resize(static_cast<std::size_t>(cur));
            for (double& w : p.w) w = rng.uniform(-a, a);
            p.b.assign(1, 0.0);
        }
        cur = ch[i];
    }
    return params;
}

NetworkParams zero_like(const NetworkParams& params) {
    NetworkParams z;
    z.layers.resize(params.layers.size());
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        z.layers[i].w.assign(params.layers[i].w.size(), 0.0);
        z.layers[i].b.assign(params.layers[i].b.size(), 0.0);
    }
    return z;
}

Tensor3D layer_forward(const std::vector<LayerSpec>& layers, const NetworkParams& params,
                       int index, ForwardTrace& trace) {
    const LayerSpec& spec = layers[static_cast<std::size_t>(index)];
    const Tensor3D& in =
        index == 0 ? trace.input : trace.outputs[static_cast<std::size_t>(index) - 1];
    Tensor3D out;
    switch (spec.kind) {
    case LayerKind::conv:
        out = conv_forward(in, spec.out_channels, spec.kernel, spec.stride,
                           params.layers[static_cast<std::size_t>(index)], index, spec);
        break;
    case LayerKind::relu: {
        out = in;
        for (double& v : out.values) v = std::max(0.0, v);
        break;
    }
    case LayerKind::maxpool: {
        if (in.height % 2 != 0 || in.width % 2 != 0)
            shape_fail(index, spec,
                       "input " + std::to_string(in.width) + "x" + std::to_string(in.height) +
                           " not divisible by 2");
        out = Tensor3D(in.channels, in.height / 2, in.width / 2);
        auto& idx = trace.pool_idx[static_cast<std::size_t>(index)];
        idx.resize(out.values.size());
        std::size_t j = 0;
        for (int c = 0; c < in.channels; ++c) {
            for (int y = 0; y < out.height; ++y) {
                for (int x = 0; x < out.width; ++x, ++j) {
                    double best = in.at(c, 2 * y, 2 * x);
                    std::size_t best_i = in.index(c, 2 * y, 2 * x);
                    for (int dy = 0; dy < 2; ++dy) {
                        for (int dx = 0; dx < 2; ++dx) {
                            const std::size_t ii = in.index(c, 2 * y + dy, 2 * x + dx);
                            if (in.values[ii] > best) {
                                best = in.values[ii];
                                best_i = ii;
                            }
                        }
                    }
                    out.values[j] = best;
                    idx[j] = static_cast<std::int32_t>(best_i);
                }
            }
        }
        break;
    }
    case LayerKind::deconv: {
        const int pi = spec.pool_source;
        const Tensor3D& pool_in =
            pi == 0 ? trace.input : trace.outputs[static_cast<std::size_t>(pi) - 1];
        const auto& idx = trace.pool_idx[static_cast<std::size_t>(pi)];
        if (idx.empty()) shape_fail(index, spec, "paired maxpool has no stored indices");
        if (in.channels != pool_in.channels || in.height * 2 != pool_in.height ||
            in.width * 2 != pool_in.width)
            shape_fail(index, spec,
                       "input " + std::to_string(in.channels) + "x" + std::to_string(in.width) +
                           "x" + std::to_string(in.height) + " does not match paired pool");
        Tensor3D up(pool_in.channels, pool_in.height, pool_in.width, 0.0);
        for (std::size_t j = 0; j < in.values.size(); ++j)
            up.values[static_cast<std::size_t>(idx[j])] = in.values[j];
        trace.unpooled[static_cast<std::size_t>(index)] = up;
        out = conv_forward(up, spec.out_channels, spec.kernel, 1,
                           params.layers[static_cast<std::size_t>(index)], index, spec);
        break;
    }
    case LayerKind::skip_concat: {
        const Tensor3D& src = trace.outputs[static_cast<std::size_t>(spec.skip_source)];
        if (src.height != in.height || src.width != in.width)
            shape_fail(index, spec,
                       "skip source " + std::to_string(src.width) + "x" +
                           std::to_string(src.height) + " vs input " + std::to_string(in.width) +
                           "x" + std::to_string(in.height));
        out = Tensor3D(in.channels + src.channels, in.height, in.width);
        std::copy(in.values.begin(), in.values.end(), out.values.begin());
        std::copy(src.values.begin(), src.values.end(), out.values.begin() + in.values.size());
        break;
    }
    case LayerKind::logistic_head: {
        const LayerParams& p = params.layers[static_cast<std::size_t>(index)];
        out = Tensor3D(1, in.height, in.width);
        const std::size_t plane = static_cast<std::size_t>(in.height) * in.width;
        for (std::size_t i = 0; i < plane; ++i) {
            double z = p.b[0];
            for (int c = 0; c < in.channels; ++c)
                z += p.w[static_cast<std::size_t>(c)] * in.values[static_cast<std::size_t>(c) * plane + i];
            out.values[i] = sigmoid(z);
        }
        break;
    }
    }
    trace.outputs[static_cast<std::size_t>(index)] = out;
    return out;
}

Tensor3D layer_backward(const std::vector<LayerSpec>& layers, const NetworkParams& params,
                        int index, const ForwardTrace& trace, const Tensor3D& grad_output,
                        NetworkParams& grads) {
    const LayerSpec& spec = layers[static_cast<std::size_t>(index)];
    if (trace.outputs.size() != layers.size() ||
        trace.outputs[static_cast<std::size_t>(index)].values.empty())
        throw ConfigError(layer_tag(index, spec) + ": no forward trace for this layer");
    const Tensor3D& in =
        index == 0 ? trace.input : trace.outputs[static_cast<std::size_t>(index) - 1];
    const Tensor3D& out = trace.outputs[static_cast<std::size_t>(index)];
    if (!grad_output.same_shape(out))
        shape_fail(index, spec, "grad_output shape does not match forward output");
    Tensor3D gin(in.channels, in.height, in.width, 0.0);
    switch (spec.kind) {
    case LayerKind::conv:
        conv_backward(in, grad_output, spec.kernel, spec.stride,
                      params.layers[static_cast<std::size_t>(index)],
                      grads.layers[static_cast<std::size_t>(index)], gin);
        break;
    case LayerKind::relu:
        for (std::size_t i = 0; i < in.values.size(); ++i)
            gin.values[i] = in.values[i] > 0.0 ? grad_output.values[i] : 0.0;
        break;
    case LayerKind::maxpool: {
        const auto& idx = trace.pool_idx[static_cast<std::size_t>(index)];
        for (std::size_t j = 0; j < grad_output.values.size(); ++j)
            gin.values[static_cast<std::size_t>(idx[j])] += grad_output.values[j];
        break;
    }
    case LayerKind::deconv: {
        const Tensor3D& up = trace.unpooled[static_cast<std::size_t>(index)];
        Tensor3D gup(up.channels, up.height, up.width, 0.0);
        conv_backward(up, grad_output, spec.kernel, 1,
                      params.layers[static_cast<std::size_t>(index)],
                      grads.layers[static_cast<std::size_t>(index)], gup);
        const auto& idx = trace.pool_idx[static_cast<std::size_t>(spec.pool_source)];
        for (std::size_t j = 0; j < gin.values.size(); ++j)
            gin.values[j] = gup.values[static_cast<std::size_t>(idx[j])];
        break;
    }
    case LayerKind::skip_concat:
        // Only the pass-through half; network_backward routes the source half.
        std::copy(grad_output.values.begin(), grad_output.values.begin() + gin.values.size(),
                  gin.values.begin());
        break;
    case LayerKind::logistic_head: {
        const LayerParams& p = params.layers[static_cast<std::size_t>(index)];
        LayerParams& gp = grads.layers[static_cast<std::size_t>(index)];
        const std::size_t plane = static_cast<std::size_t>(in.height) * in.width;
        for (std::size_t i = 0; i < plane; ++i) {
            const double s = out.values[i];
            const double gz = grad_output.values[i] * s * (1.0 - s);
            gp.b[0] += gz;
            for (int c = 0; c < in.channels; ++c) {
                const std::size_t ii = static_cast<std::size_t>(c) * plane + i;
                gp.w[static_cast<std::size_t>(c)] += gz * in.values[ii];
                gin.values[ii] = gz * p.w[static_cast<std::size_t>(c)];
            }
        }
        break;
    }
    }
    return gin;
}

Tensor3D network_forward(const std::vector<LayerSpec>& layers, const NetworkParams& params,
                         const Tensor3D& input, ForwardTrace& trace) {
    if (params.layers.size() != layers.size())
        throw ShapeError("params do not match the layer list");
    trace.input = input;
    trace.outputs.assign(layers.size(), Tensor3D());
    trace.pool_idx.assign(layers.size(), {});
    trace.unpooled.assign(layers.size(), Tensor3D());
    Tensor3D out;
    for (int i = 0; i < static_cast<int>(layers.size()); ++i) out = layer_forward(layers, params, i, trace);
    return out;
}

ScalarField2D network_forward_field(const std::vector<LayerSpec>& layers,
                                    const NetworkParams& params, const ScalarField2D& input,
                                    ForwardTrace& trace) {
    Tensor3D t(1, input.grid.height, input.grid.width);
    t.values = input.values;
    const Tensor3D out = network_forward(layers, params, t, trace);
    if (out.channels != 1 || out.height != input.grid.height || out.width != input.grid.width)
        throw ShapeError("network output is not a single full-resolution channel");
    ScalarField2D y(input.grid);
    y.values = out.values;
    return y;
}

NetworkParams network_backward(const std::vector<LayerSpec>& layers, const NetworkParams& params,
                               const ForwardTrace& trace, const Tensor3D& grad_output,
                               Tensor3D* grad_input) {
    NetworkParams grads = zero_like(params);
    const int n = static_cast<int>(layers.size());
    std::vector<Tensor3D> gouts(static_cast<std::size_t>(n));
    gouts[static_cast<std::size_t>(n) - 1] = grad_output;
    if (grad_input != nullptr)
        *grad_input = Tensor3D(trace.input.channels, trace.input.height, trace.input.width, 0.0);
    auto accumulate = [&](Tensor3D& slot, const Tensor3D& g) {
        if (slot.values.empty()) {
            slot = g;
        } else {
            for (std::size_t i = 0; i < slot.values.size(); ++i) slot.values[i] += g.values[i];
        }
    };
    auto route_to_prev = [&](int i, const Tensor3D& gin) {
        if (i > 0)
            accumulate(gouts[static_cast<std::size_t>(i) - 1], gin);
        else if (grad_input != nullptr)
            accumulate(*grad_input, gin);
    };
    for (int i = n - 1; i >= 0; --i) {
        const LayerSpec& spec = layers[static_cast<std::size_t>(i)];
        Tensor3D& go = gouts[static_cast<std::size_t>(i)];
        if (go.values.empty()) {
            // layer feeds only a skip that was never consumed downstream
            const Tensor3D& out = trace.outputs[static_cast<std::size_t>(i)];
            go = Tensor3D(out.channels, out.height, out.width, 0.0);
        }
        if (spec.kind == LayerKind::skip_concat) {
            const Tensor3D& in =
                i == 0 ? trace.input : trace.outputs[static_cast<std::size_t>(i) - 1];
            Tensor3D gin(in.channels, in.height, in.width, 0.0);
            std::copy(go.values.begin(), go.values.begin() + gin.values.size(),
                      gin.values.begin());
            const Tensor3D& src = trace.outputs[static_cast<std::size_t>(spec.skip_source)];
            Tensor3D gsrc(src.channels, src.height, src.width, 0.0);
            std::copy(go.values.begin() + gin.values.size(), go.values.end(),
                      gsrc.values.begin());
            accumulate(gouts[static_cast<std::size_t>(spec.skip_source)], gsrc);
            route_to_prev(i, gin);
        } else {
            const Tensor3D gin = layer_backward(layers, params, i, trace, go, grads);
            route_to_prev(i, gin);
        }
        go = Tensor3D(); // release
    }
    return grads;
}

void sgd_update(NetworkParams& params, const NetworkParams& grads, double learning_rate) {
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (grads.layers.size() != params.layers.size())
        throw ShapeError("gradient/parameter layer count mismatch");
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        LayerParams& p = params.layers[i];
        const LayerParams& g = grads.layers[i];
        if (g.w.size() != p.w.size() || g.b.size() != p.b.size())
            throw ShapeError("gradient/parameter shape mismatch at layer " + std::to_string(i));
        for (std::size_t j = 0; j < p.w.size(); ++j) p.w[j] -= learning_rate * g.w[j];
        for (std::size_t j = 0; j < p.b.size(); ++j) p.b[j] -= learning_rate * g.b[j];
    }
}

namespace {

constexpr char kCkptMagic[4] = {'R', 'L', 'S', 'N'};
constexpr std::uint32_t kCkptVersion = 1;

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_i32(std::string& buf, std::int32_t v) { put_u32(buf, static_cast<std::uint32_t>(v)); }
void put_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& buf, double v) { put_u64(buf, std::bit_cast<std::uint64_t>(v)); }

class Reader {
public:
    Reader(const std::string& data, const std::string& path) : data_(data), path_(path) {}
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    void magic() {
        need(4);
        if (std::memcmp(data_.data() + pos_, kCkptMagic, 4) != 0)
            throw ParseError(path_ + ": bad checkpoint magic", pos_);
        pos_ += 4;
    }
    std::size_t pos() const { return pos_; }
    void done() const {
        if (pos_ != data_.size())
            throw ParseError(path_ + ": trailing bytes after checkpoint payload", pos_);
    }

private:
    void need(std::size_t n) const {
        if (pos_ + n > data_.size())
            throw ParseError(path_ + ": truncated checkpoint", data_.size());
    }
    const std::string& data_;
    std::string path_;
    std::size_t pos_ = 0;
};

} // namespace

void save_checkpoint(const std::string& path, const std::vector<LayerSpec>& layers,
                     const NetworkParams& params) {
    if (params.layers.size() != layers.size())
        throw ShapeError("params do not match the layer list");
    std::string buf;
    buf.append(kCkptMagic, 4);
    put_u32(buf, kCkptVersion);
    put_u32(buf, static_cast<std::uint32_t>(layers.size()));
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& l = layers[i];
        put_u32(buf, static_cast<std::uint32_t>(l.kind));
        put_i32(buf, l.out_channels);
        put_i32(buf, l.kernel);
        put_i32(buf, l.stride);
        put_i32(buf, l.skip_source);
        put_i32(buf, l.pool_source);
        put_u64(buf, params.layers[i].w.size());
        put_u64(buf, params.layers[i].b.size());
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        for (double v : params.layers[i].w) put_f64(buf, v);
        for (double v : params.layers[i].b) put_f64(buf, v);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("short write to " + path);
}

std::pair<std::vector<LayerSpec>, NetworkParams> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Reader r(data, path);
    r.magic();
    const std::uint32_t version = r.u32();
    if (version != kCkptVersion)
        throw ParseError(path + ": unsupported checkpoint version " + std::to_string(version),
                         r.pos());
    const std::uint32_t count = r.u32();
    std::vector<LayerSpec> layers(count);
    NetworkParams params;
    params.layers.resize(count);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> sizes(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t kind = r.u32();
        if (kind > static_cast<std::uint32_t>(LayerKind::logistic_head))
            throw ParseError(path + ": unknown layer kind " + std::to_string(kind), r.pos());
        layers[i].kind = static_cast<LayerKind>(kind);
        layers[i].out_channels = r.i32();
        layers[i].kernel = r.i32();
        layers[i].stride = r.i32();
        layers[i].skip_source = r.i32();
        layers[i].pool_source = r.i32();
        sizes[i] = {r.u64(), r.u64()};
    }
    for (std::uint32_t i = 0; i < count; ++i) {
        params.layers[i].w.resize(sizes[i].first);
        for (auto& v : params.layers[i].w) v = r.f64();
        params.layers[i].b.resize(sizes[i].second);
        for (auto& v : params.layers[i].b) v = r.f64();
    }
    r.done();
    return {std::move(layers), std::move(params)};
}

std::vector<LayerSpec> default_layers() {
    std::vector<LayerSpec> layers = {
        LayerSpec::Conv(16, 3),  // 0
        LayerSpec::Relu(),       // 1
        LayerSpec::MaxPool(),    // 2
        LayerSpec::Conv(32, 3),  // 3
        LayerSpec::Relu(),       // 4
        LayerSpec::MaxPool(),    // 5
        LayerSpec::Conv(32, 3),  // 6
        LayerSpec::Relu(),       // 7
        LayerSpec::Deconv(32),   // 8 <- pool 5
        LayerSpec::SkipConcat(4),
        LayerSpec::Conv(16, 3),
        LayerSpec::Relu(),
        LayerSpec::Deconv(16), // <- pool 2
        LayerSpec::SkipConcat(1),
        LayerSpec::Conv(8, 3),
        LayerSpec::Relu(),
        LayerSpec::LogisticHead(),
    };
    return resolve_structure(std::move(layers));
}

} // namespace rlseg
