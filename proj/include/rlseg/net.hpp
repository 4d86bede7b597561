#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rlseg/field.hpp"

// From-scratch convolutional encoder-decoder: conv / relu / maxpool with
// stored indices / deconv (index unpool + learned conv) / skip concatenation
// / logistic head, with exact backpropagation. All arithmetic is 64-bit.
//
// Convolutions are cross-correlations with mirror (reflect-101) padding, so
// spatial size is preserved before striding.

namespace rlseg {

struct Tensor3D {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> values; // channel-major: ((c*H)+y)*W + x

    Tensor3D() = default;
    Tensor3D(int c, int h, int w, double fill = 0.0)
        : channels(c), height(h), width(w),
          values(static_cast<std::size_t>(c) * h * w, fill) {
        if (c < 1 || h < 1 || w < 1) throw ShapeError("tensor dims must be >= 1");
    }

    std::size_t index(int c, int y, int x) const {
        return (static_cast<std::size_t>(c) * height + y) * width + x;
    }
    double& at(int c, int y, int x) { return values[index(c, y, x)]; }
    double at(int c, int y, int x) const { return values[index(c, y, x)]; }
    double* row(int c, int y) { return values.data() + index(c, y, 0); }
    const double* row(int c, int y) const { return values.data() + index(c, y, 0); }
    bool same_shape(const Tensor3D& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }
};

enum class LayerKind : std::uint32_t {
    conv = 0,
    relu = 1,
    maxpool = 2, // 2x2, stride 2, stores argmax indices
    deconv = 3,  // unpool by stored indices (factor 2), then learned 3x3 conv
    skip_concat = 4,
    logistic_head = 5, // learned 1x1 conv to 1 channel + sigmoid
};

struct LayerSpec {
    LayerKind kind = LayerKind::conv;
    int out_channels = 0; // conv, deconv (logistic_head is fixed to 1)
    int kernel = 3;       // conv / deconv post-conv; must be odd
    int stride = 1;       // conv only
    int skip_source = -1; // skip_concat: index of the layer whose output joins
    int pool_source = -1; // deconv: index of the paired maxpool (auto if -1)

    static LayerSpec Conv(int out_channels, int kernel = 3, int stride = 1) {
        return {LayerKind::conv, out_channels, kernel, stride, -1, -1};
    }
    static LayerSpec Relu() { return {LayerKind::relu, 0, 0, 1, -1, -1}; }
    static LayerSpec MaxPool() { return {LayerKind::maxpool, 0, 0, 2, -1, -1}; }
    static LayerSpec Deconv(int out_channels, int pool_source = -1) {
        return {LayerKind::deconv, out_channels, 3, 1, -1, pool_source};
    }
    static LayerSpec SkipConcat(int source) {
        return {LayerKind::skip_concat, 0, 0, 1, source, -1};
    }
    static LayerSpec LogisticHead() { return {LayerKind::logistic_head, 1, 1, 1, -1, -1}; }

    bool operator==(const LayerSpec&) const = default;
};

struct LayerParams {
    std::vector<double> w;
    std::vector<double> b;
};

struct NetworkParams {
    std::vector<LayerParams> layers; // aligned with the LayerSpec list
};

struct ForwardTrace {
    Tensor3D input;
    std::vector<Tensor3D> outputs;                   // one per layer
    std::vector<std::vector<std::int32_t>> pool_idx; // maxpool layers only
    std::vector<Tensor3D> unpooled;                  // deconv layers only
};

// Pairs each deconv with the most recent unconsumed maxpool, validates skip
// sources point at earlier layers, kernels are odd, strides >= 1.
std::vector<LayerSpec> resolve_structure(std::vector<LayerSpec> layers);

// Output channel count of every layer given the input channel count.
std::vector<int> infer_channels(const std::vector<LayerSpec>& layers, int in_channels);

// Glorot-uniform initialization (+-sqrt(6/(fan_in+fan_out))), seeded.
NetworkParams init_params(const std::vector<LayerSpec>& layers, int in_channels,
                          std::uint64_t seed);

NetworkParams zero_like(const NetworkParams& params);

// Runs layer `index`; appends its output (and any pool indices / unpooled
// intermediates) to the trace. The layer input is the previous layer's
// output, or trace.input for index 0.
Tensor3D layer_forward(const std::vector<LayerSpec>& layers, const NetworkParams& params,
                       int index, ForwardTrace& trace);

// Exact gradients for layer `index`: returns grad wrt the layer input and
// accumulates parameter gradients into `grads`.
Tensor3D layer_backward(const std::vector<LayerSpec>& layers, const NetworkParams& params,
                        int index, const ForwardTrace& trace, const Tensor3D& grad_output,
                        NetworkParams& grads);

// Full forward pass; output keeps the input's spatial size and lies strictly
// in (0, 1). Input spatial dims must be divisible by the total pool factor.
Tensor3D network_forward(const std::vector<LayerSpec>& layers, const NetworkParams& params,
                         const Tensor3D& input, ForwardTrace& trace);

// ScalarField2D convenience wrappers (single-channel input).
ScalarField2D network_forward_field(const std::vector<LayerSpec>& layers,
                                    const NetworkParams& params, const ScalarField2D& input,
                                    ForwardTrace& trace);

// grad_input, when non-null, receives d(loss)/d(network input).
NetworkParams network_backward(const std::vector<LayerSpec>& layers, const NetworkParams& params,
                               const ForwardTrace& trace, const Tensor3D& grad_output,
                               Tensor3D* grad_input = nullptr);

void sgd_update(NetworkParams& params, const NetworkParams& grads, double learning_rate);

// Binary checkpoint: magic "RLSN", version, layer table, then little-endian
// 64-bit floats per layer (weights then biases) in declaration order.
void save_checkpoint(const std::string& path, const std::vector<LayerSpec>& layers,
                     const NetworkParams& params);
std::pair<std::vector<LayerSpec>, NetworkParams> load_checkpoint(const std::string& path);

// conv(16)-relu-pool-conv(32)-relu-pool-conv(32)-relu /
// deconv(32)-skip-conv(16)-relu-deconv(16)-skip-conv(8)-relu-head.
std::vector<LayerSpec> default_layers();

} // namespace rlseg
