#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "rlseg/net.hpp"
#include "rlseg/rng.hpp"

using namespace rlseg;

namespace {

Tensor3D random_tensor(Rng& rng, int c, int h, int w, double lo = -1.0, double hi = 1.0) {
    Tensor3D t(c, h, w);
    for (double& v : t.values) v = rng.uniform(lo, hi);
    return t;
}

ForwardTrace fresh_trace(const std::vector<LayerSpec>& layers, const Tensor3D& input) {
    ForwardTrace trace;
    trace.input = input;
    trace.outputs.assign(layers.size(), Tensor3D());
    trace.pool_idx.assign(layers.size(), {});
    trace.unpooled.assign(layers.size(), Tensor3D());
    return trace;
}

} // namespace

TEST_SUITE("net") {

TEST_CASE("1x1 identity kernel is the identity") {
    const std::vector<LayerSpec> layers = resolve_structure({LayerSpec::Conv(1, 1)});
    NetworkParams params;
    params.layers.resize(1);
    params.layers[0].w = {1.0};
    params.layers[0].b = {0.0};
    Rng rng(1);
    const Tensor3D in = random_tensor(rng, 1, 5, 6);
    ForwardTrace trace;
    const Tensor3D out = network_forward(layers, params, in, trace);
    CHECK(out.values == in.values);
}

TEST_CASE("3x3 averaging kernel reproduces the patch mean at the center") {
    const std::vector<LayerSpec> layers = resolve_structure({LayerSpec::Conv(1, 3)});
    NetworkParams params;
    params.layers.resize(1);
    params.layers[0].w.assign(9, 1.0 / 9.0);
    params.layers[0].b = {0.0};
    Rng rng(2);
    const Tensor3D in = random_tensor(rng, 1, 3, 3);
    ForwardTrace trace;
    const Tensor3D out = network_forward(layers, params, in, trace);
    double mean = 0.0;
    for (double v : in.values) mean += v;
    mean /= 9.0;
    CHECK(out.at(0, 1, 1) == doctest::Approx(mean).epsilon(1e-14));
}

TEST_CASE("relu backward blocks gradient at non-positive inputs") {
    const std::vector<LayerSpec> layers = resolve_structure({LayerSpec::Relu()});
    NetworkParams params;
    params.layers.resize(1);
    Rng rng(3);
    const Tensor3D in = random_tensor(rng, 2, 4, 4);
    ForwardTrace trace = fresh_trace(layers, in);
    layer_forward(layers, params, 0, trace);
    Tensor3D gout(2, 4, 4, 1.0);
    NetworkParams grads = zero_like(params);
    const Tensor3D gin = layer_backward(layers, params, 0, trace, gout, grads);
    for (std::size_t i = 0; i < in.values.size(); ++i)
        CHECK(gin.values[i] == (in.values[i] > 0.0 ? 1.0 : 0.0));
}

TEST_CASE("conv backward with zero upstream gradient is zero") {
    const std::vector<LayerSpec> layers = resolve_structure({LayerSpec::Conv(3, 3)});
    NetworkParams params = init_params(layers, 2, 7);
    Rng rng(4);
    const Tensor3D in = random_tensor(rng, 2, 5, 5);
    ForwardTrace trace = fresh_trace(layers, in);
    layer_forward(layers, params, 0, trace);
    Tensor3D gout(3, 5, 5, 0.0);
    NetworkParams grads = zero_like(params);
    const Tensor3D gin = layer_backward(layers, params, 0, trace, gout, grads);
    for (double v : gin.values) CHECK(v == 0.0);
    for (double v : grads.layers[0].w) CHECK(v == 0.0);
    for (double v : grads.layers[0].b) CHECK(v == 0.0);
}

TEST_CASE("maxpool stores argmax and conserves gradient mass") {
    const std::vector<LayerSpec> layers = resolve_structure({LayerSpec::MaxPool()});
    NetworkParams params;
    params.layers.resize(1);
    Rng rng(5);
    const Tensor3D in = random_tensor(rng, 3, 6, 8);
    ForwardTrace trace = fresh_trace(layers, in);
    const Tensor3D out = layer_forward(layers, params, 0, trace);
    CHECK(out.height == 3);
    CHECK(out.width == 4);
    for (std::size_t j = 0; j < out.values.size(); ++j)
        CHECK(out.values[j] == in.values[static_cast<std::size_t>(trace.pool_idx[0][j])]);

    Tensor3D gout(3, 3, 4);
    for (double& v : gout.values) v = rng.uniform(-1, 1);
    NetworkParams grads = zero_like(params);
    const Tensor3D gin = layer_backward(layers, params, 0, trace, gout, grads);
    double in_sum = 0.0, out_sum = 0.0;
    for (double v : gin.values) in_sum += v;
    for (double v : gout.values) out_sum += v;
    CHECK(in_sum == doctest::Approx(out_sum).epsilon(1e-12));

    Tensor3D odd(1, 5, 6);
    ForwardTrace t2 = fresh_trace(layers, odd);
    CHECK_THROWS_AS(layer_forward(layers, params, 0, t2), ShapeError);
}

TEST_CASE("network output keeps the input spatial size and lies in (0,1)") {
    const std::vector<LayerSpec> layers = default_layers();
    Rng rng(6);
    for (int trial = 0; trial < 3; ++trial) {
        const NetworkParams params =
            init_params(layers, 1, static_cast<std::uint64_t>(100 + trial));
        const Tensor3D in = random_tensor(rng, 1, 32, 24, 0.0, 1.0);
        ForwardTrace trace;
        const Tensor3D out = network_forward(layers, params, in, trace);
        CHECK(out.channels == 1);
        CHECK(out.height == 32);
        CHECK(out.width == 24);
        for (double v : out.values) {
            CHECK(v > 0.0);
            CHECK(v < 1.0);
            CHECK(std::isfinite(v));
        }
    }
}

TEST_CASE("indivisible input dims raise a structural error naming the layer") {
    const std::vector<LayerSpec> layers = default_layers();
    const NetworkParams params = init_params(layers, 1, 8);
    const Tensor3D in(1, 30, 30); // 30 not divisible by 4 (two pools)
    ForwardTrace trace;
    CHECK_THROWS_WITH_AS(network_forward(layers, params, in, trace),
                         doctest::Contains("maxpool"), ShapeError);
}

TEST_CASE("zero-initialized logistic head outputs 0.5 everywhere") {
    const std::vector<LayerSpec> layers = resolve_structure({LayerSpec::LogisticHead()});
    NetworkParams params;
    params.layers.resize(1);
    params.layers[0].w = {0.0, 0.0};
    params.layers[0].b = {0.0};
    Rng rng(7);
    const Tensor3D in = random_tensor(rng, 2, 6, 6);
    ForwardTrace trace;
    const Tensor3D out = network_forward(layers, params, in, trace);
    for (double v : out.values) CHECK(v == 0.5);
}

TEST_CASE("logistic head gradient matches y(1-y) closed form") {
    const std::vector<LayerSpec> layers = resolve_structure({LayerSpec::LogisticHead()});
    NetworkParams params;
    params.layers.resize(1);
    params.layers[0].w = {0.8};
    params.layers[0].b = {-0.2};
    Rng rng(8);
    const Tensor3D in = random_tensor(rng, 1, 4, 4);
    ForwardTrace trace;
    const Tensor3D y = network_forward(layers, params, in, trace);
    Tensor3D gout(1, 4, 4);
    for (double& v : gout.values) v = rng.uniform(-1, 1);
    NetworkParams grads = zero_like(params);
    const Tensor3D gin = layer_backward(layers, params, 0, trace, gout, grads);
    double gb = 0.0, gw = 0.0;
    for (std::size_t i = 0; i < y.values.size(); ++i) {
        const double gz = gout.values[i] * y.values[i] * (1.0 - y.values[i]);
        gb += gz;
        gw += gz * in.values[i];
        CHECK(gin.values[i] == doctest::Approx(gz * 0.8).epsilon(1e-12));
    }
    CHECK(grads.layers[0].b[0] == doctest::Approx(gb).epsilon(1e-12));
    CHECK(grads.layers[0].w[0] == doctest::Approx(gw).epsilon(1e-12));
}

TEST_CASE("network_backward with zero grad_y yields zero parameter gradients") {
    const std::vector<LayerSpec> layers = default_layers();
    const NetworkParams params = init_params(layers, 1, 9);
    Rng rng(9);
    const Tensor3D in = random_tensor(rng, 1, 16, 16, 0.0, 1.0);
    ForwardTrace trace;
    network_forward(layers, params, in, trace);
    const Tensor3D gout(1, 16, 16, 0.0);
    const NetworkParams grads = network_backward(layers, params, trace, gout);
    for (const auto& l : grads.layers) {
        for (double v : l.w) CHECK(v == 0.0);
        for (double v : l.b) CHECK(v == 0.0);
    }
}

TEST_CASE("stale or missing trace is a usage error") {
    const std::vector<LayerSpec> layers = resolve_structure({LayerSpec::Conv(2, 3)});
    const NetworkParams params = init_params(layers, 1, 10);
    ForwardTrace empty;
    empty.input = Tensor3D(1, 4, 4);
    empty.outputs.assign(1, Tensor3D());
    empty.pool_idx.assign(1, {});
    empty.unpooled.assign(1, Tensor3D());
    NetworkParams grads = zero_like(params);
    CHECK_THROWS_AS(layer_backward(layers, params, 0, empty, Tensor3D(2, 4, 4), grads),
                    ConfigError);
}

TEST_CASE("sgd_update basics") {
    const std::vector<LayerSpec> layers = resolve_structure({LayerSpec::Conv(2, 3)});
    NetworkParams params = init_params(layers, 1, 11);
    const NetworkParams before = params;

    sgd_update(params, zero_like(params), 0.1);
    CHECK(params.layers[0].w == before.layers[0].w);

    NetworkParams grads = params; // grad == params, lr == 1 zeroes everything
    sgd_update(params, grads, 1.0);
    for (double v : params.layers[0].w) CHECK(v == 0.0);

    CHECK_THROWS_AS(sgd_update(params, grads, 0.0), ConfigError);
}

TEST_CASE("one sgd step on the analytic gradient lowers a quadratic probe loss") {
    // loss = 0.5 * sum((y - t)^2) on a conv+head net
    const std::vector<LayerSpec> layers =
        resolve_structure({LayerSpec::Conv(3, 3), LayerSpec::Relu(), LayerSpec::LogisticHead()});
    NetworkParams params = init_params(layers, 1, 12);
    Rng rng(12);
    const Tensor3D in = random_tensor(rng, 1, 8, 8, 0.0, 1.0);
    Tensor3D target(1, 8, 8);
    for (double& v : target.values) v = rng.uniform(0.0, 1.0);

    auto loss_of = [&](const NetworkParams& p) {
        ForwardTrace t;
        const Tensor3D y = network_forward(layers, p, in, t);
        double s = 0.0;
        for (std::size_t i = 0; i < y.values.size(); ++i) {
            const double r = y.values[i] - target.values[i];
            s += 0.5 * r * r;
        }
        return s;
    };

    ForwardTrace trace;
    const Tensor3D y = network_forward(layers, params, in, trace);
    Tensor3D gout(1, 8, 8);
    for (std::size_t i = 0; i < y.values.size(); ++i)
        gout.values[i] = y.values[i] - target.values[i];
    const NetworkParams grads = network_backward(layers, params, trace, gout);

    const double before = loss_of(params);
    sgd_update(params, grads, 1e-4);
    CHECK(loss_of(params) < before);
}

TEST_CASE("forward is deterministic and repeatable") {
    const std::vector<LayerSpec> layers = default_layers();
    const NetworkParams params = init_params(layers, 1, 13);
    Rng rng(13);
    const Tensor3D in = random_tensor(rng, 1, 16, 16, 0.0, 1.0);
    ForwardTrace t1, t2;
    const Tensor3D a = network_forward(layers, params, in, t1);
    const Tensor3D b = network_forward(layers, params, in, t2);
    CHECK(a.values == b.values);
}

TEST_CASE("checkpoint round-trips bitwise and validates structure") {
    const std::vector<LayerSpec> layers = default_layers();
    const NetworkParams params = init_params(layers, 1, 14);
    const std::string path = (std::filesystem::temp_directory_path() / "rlseg_ckpt_test.bin").string();
    save_checkpoint(path, layers, params);
    const auto [loaded_layers, loaded_params] = load_checkpoint(path);
    CHECK(loaded_layers == layers);
    REQUIRE(loaded_params.layers.size() == params.layers.size());
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        CHECK(loaded_params.layers[i].w == params.layers[i].w);
        CHECK(loaded_params.layers[i].b == params.layers[i].b);
    }

    // truncated payload is a parse error
    std::filesystem::resize_file(path, 40);
    CHECK_THROWS_AS(load_checkpoint(path), ParseError);
    std::filesystem::remove(path);
}

TEST_CASE("deconv without a pool to pair with is rejected") {
    CHECK_THROWS_AS(resolve_structure({LayerSpec::Deconv(4)}), ShapeError);
    CHECK_THROWS_AS(resolve_structure({LayerSpec::SkipConcat(3), LayerSpec::Relu()}), ShapeError);
    CHECK_THROWS_AS(resolve_structure({LayerSpec::Conv(2, 4)}), ShapeError); // even kernel
}

} // TEST_SUITE
