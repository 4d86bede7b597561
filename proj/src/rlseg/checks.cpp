#include "rlseg/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "rlseg/distance.hpp"
#include "rlseg/levelset.hpp"
#include "rlseg/net.hpp"
#include "rlseg/rng.hpp"

namespace rlseg {

namespace {

std::string fmt(const char* format, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), format, a, b);
    return buf;
}

// Relative error with an absolute floor so that zero-vs-rounding comparisons
// do not blow up: |a-f| / max(|a|, |f|, floor).
double rel_error(double actual, double reference, double floor_) {
    return std::abs(actual - reference) /
           std::max({std::abs(actual), std::abs(reference), floor_});
}

ScalarField2D random_field(Rng& rng, const Grid2D& grid, double lo, double hi) {
    ScalarField2D f(grid);
    for (double& v : f.values) v = rng.uniform(lo, hi);
    return f;
}

ScalarField2D box_blur(const ScalarField2D& f) {
    ScalarField2D out(f.grid);
    const int w = f.grid.width, h = f.grid.height;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double sum = 0.0;
            int n = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int xx = x + dx, yy = y + dy;
                    if (xx >= 0 && xx < w && yy >= 0 && yy < h) {
                        sum += f.at(xx, yy);
                        ++n;
                    }
                }
            }
            out.at(x, y) = sum / n;
        }
    }
    return out;
}

BinaryMask random_mask(Rng& rng, const Grid2D& grid, double density) {
    BinaryMask m(grid);
    for (auto& v : m.values) v = rng.uniform() < density ? 1 : 0;
    return m;
}

// ------------------------------------------------------------- level set

CheckResult check_heaviside_identities() {
    Rng rng(101);
    double worst = 0.0;
    bool monotone = true;
    for (int i = 0; i < 100; ++i) {
        const double eps = rng.uniform(0.25, 4.0);
        const double tau = rng.uniform(-8.0, 8.0);
        worst = std::max(worst, std::abs(heaviside(tau, eps) + heaviside(-tau, eps) - 1.0));
        const double step = rng.uniform(1e-4, 1.0);
        if (!(heaviside(tau + step, eps) > heaviside(tau, eps))) monotone = false;
        if (!(dirac(tau, eps) > 0.0)) monotone = false;
    }
    const bool pass = worst == 0.0 && monotone;
    return {"heaviside-identities",
            pass, fmt("max |H(t)+H(-t)-1| = %.1e (exactness required), monotone+positive", worst)};
}

CheckResult check_dirac_matches_dh() {
    Rng rng(102);
    const double h = 1e-5;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double eps = rng.uniform(0.5, 2.0);
        const double tau = rng.uniform(-5.0, 5.0);
        const double fd = (heaviside(tau + h, eps) - heaviside(tau - h, eps)) / (2.0 * h);
        worst = std::max(worst, rel_error(dirac(tau, eps), fd, 1e-12));
    }
    return {"dirac-matches-dH", worst <= 1e-6, fmt("max rel err %.2e (limit 1e-6)", worst)};
}

struct EnergyProbe {
    ScalarField2D u, phi;
    BinaryMask gt;
    EnergyWeights w;
    DataFieldMode mode = DataFieldMode::as_written;
};

EnergyProbe random_energy_probe(Rng& rng, int n, bool smooth_phi) {
    const Grid2D grid(n, n);
    EnergyProbe p;
    p.phi = random_field(rng, grid, -2.0, 2.0);
    if (smooth_phi) p.phi = box_blur(p.phi);
    p.u = random_field(rng, grid, 0.0, 1.0);
    p.gt = random_mask(rng, grid, 0.5);
    p.w.mu = rng.uniform(0.0, 0.3);
    p.w.nu = rng.uniform() < 0.5 ? rng.uniform(-0.8, -0.1) : rng.uniform(0.1, 0.8);
    p.w.alpha = rng.uniform(0.0, 1.5);
    p.w.lambda1 = rng.uniform(0.2, 1.5);
    p.w.lambda2 = rng.uniform(0.2, 1.5);
    p.w.epsilon = rng.uniform(0.7, 1.5);
    p.mode = rng.uniform() < 0.25 ? DataFieldMode::feature_map : DataFieldMode::as_written;
    return p;
}

// Independent re-derivation of the per-pixel energy contribution (already
// times spacing^2); summed it must reproduce energy() to rounding error.
std::vector<double> energy_integrand(const EnergyProbe& p, const RegionConstants& c,
                                     const ScalarField2D& phi) {
    const VectorField2D g = gradient(phi);
    const double s2 = phi.grid.spacing * phi.grid.spacing;
    std::vector<double> e(phi.values.size());
    for (std::size_t i = 0; i < phi.values.size(); ++i) {
        const double hh = heaviside(phi.values[i], p.w.epsilon);
        const double d = p.mode == DataFieldMode::as_written ? hh : p.u.values[i];
        const double mag = std::sqrt(g.dx[i] * g.dx[i] + g.dy[i] * g.dy[i]);
        const double rg = hh - static_cast<double>(p.gt.values[i]);
        const double r1 = d - c.c1, r2 = d - c.c2;
        e[i] = (p.w.mu * hh + p.w.nu * dirac(phi.values[i], p.w.epsilon) * mag +
                p.w.alpha * rg * rg + p.w.lambda1 * r1 * r1 * hh +
                p.w.lambda2 * r2 * r2 * (1.0 - hh)) *
               s2;
    }
    return e;
}

CheckResult check_energy_gradient_fd() {
    Rng rng(103);
    const double h = 1e-4;
    double worst = 0.0;
    double worst_sum = 0.0;
    int checked = 0;
    for (int inst = 0; inst < 20; ++inst) {
        EnergyProbe p = random_energy_probe(rng, 12, false);
        const RegionConstants c = region_constants(p.u, p.phi, p.w.epsilon, p.mode);
        const ScalarField2D grad = energy_gradient_phi(p.u, p.phi, &p.gt, c, p.w, p.mode);
        const VectorField2D g = gradient(p.phi);

        // Tie the oracle integrand to the production energy once per instance.
        const std::vector<double> base = energy_integrand(p, c, p.phi);
        double base_sum = 0.0;
        for (double v : base) base_sum += v;
        const double e_ref = energy(p.u, p.phi, &p.gt, c, p.w, p.mode);
        worst_sum = std::max(worst_sum, rel_error(base_sum, e_ref, 1e-9));

        double max_fd = 0.0;
        std::vector<double> fd(p.phi.values.size());
        for (std::size_t i = 0; i < p.phi.values.size(); ++i) {
            ScalarField2D phi_p = p.phi;
            phi_p.values[i] += h;
            ScalarField2D phi_m = p.phi;
            phi_m.values[i] -= h;
            const std::vector<double> ep = energy_integrand(p, c, phi_p);
            const std::vector<double> em = energy_integrand(p, c, phi_m);
            // summing per-pixel differences keeps untouched pixels at exact 0
            double diff = 0.0;
            for (std::size_t j = 0; j < ep.size(); ++j) diff += ep[j] - em[j];
            fd[i] = diff / (2.0 * h);
            max_fd = std::max(max_fd, std::abs(fd[i]));
        }
        // Floor sits at the FD truncation scale; genuine defects are O(|grad|).
        const double floor_ = 1e-4 * (1.0 + max_fd);
        for (std::size_t i = 0; i < fd.size(); ++i) {
            if (std::hypot(g.dx[i], g.dy[i]) <= 0.1) continue; // norm regularizer kinks here
            worst = std::max(worst, rel_error(grad.values[i], fd[i], floor_));
            ++checked;
        }
    }
    const bool pass = worst <= 1e-4 && worst_sum <= 1e-12;
    return {"energy-gradient-fd", pass,
            fmt("max rel err %.2e over %.0f pixels (limit 1e-4)", worst, double(checked)) +
                fmt(", integrand-vs-energy %.1e (limit 1e-12)", worst_sum)};
}

CheckResult check_region_constant_stationarity() {
    Rng rng(104);
    double worst = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
        const int n = rng.uniform_int(8, 24);
        EnergyProbe p = random_energy_probe(rng, n, false);
        const RegionConstants c = region_constants(p.u, p.phi, p.w.epsilon, p.mode);
        const auto [g1, g2] = energy_gradient_c(p.u, p.phi, c, p.w, p.mode);
        worst = std::max({worst, std::abs(g1), std::abs(g2)});
    }
    return {"region-constant-stationarity", worst <= 1e-10,
            fmt("max |dE/dc| = %.2e (limit 1e-10)", worst)};
}

CheckResult check_energy_descent() {
    Rng rng(105);
    int ok = 0;
    const int trials = 100;
    for (int inst = 0; inst < trials; ++inst) {
        EnergyProbe p = random_energy_probe(rng, 16, true);
        p.w.alpha = rng.uniform(0.3, 1.0);
        EvolutionConfig cfg;
        cfg.eta = 1e-3;
        cfg.include_supervision_in_evolution = true;
        cfg.data_field_mode = p.mode;
        const RegionConstants c0 = region_constants(p.u, p.phi, p.w.epsilon, p.mode);
        const double e0 = energy(p.u, p.phi, &p.gt, c0, p.w, p.mode);
        const ScalarField2D phi1 = evolution_step(p.phi, p.u, &p.gt, c0, p.w, cfg);
        const RegionConstants c1 = region_constants(p.u, phi1, p.w.epsilon, p.mode);
        const double e1 = energy(p.u, phi1, &p.gt, c1, p.w, p.mode);
        if (e1 <= e0 + 1e-12 * std::abs(e0)) ++ok;
    }
    return {"energy-descent", ok >= 95, fmt("%.0f/100 single steps decreased energy (need 95)", double(ok))};
}

// ----------------------------------------------------------- neural net

// Quadruple-loop direct cross-correlation, mirror padding; independent of the
// production conv path.
Tensor3D conv_reference(const Tensor3D& in, int out_channels, int kernel, int stride,
                        const std::vector<double>& w, const std::vector<double>& b) {
    const int pad = kernel / 2;
    auto mir = [](int i, int n) {
        if (n == 1) return 0;
        if (i < 0) return -i;
        if (i >= n) return 2 * n - 2 - i;
        return i;
    };
    Tensor3D out(out_channels, in.height / stride, in.width / stride);
    for (int oc = 0; oc < out_channels; ++oc) {
        for (int y = 0; y < out.height; ++y) {
            for (int x = 0; x < out.width; ++x) {
                double acc = b[static_cast<std::size_t>(oc)];
                for (int ic = 0; ic < in.channels; ++ic) {
                    for (int ky = 0; ky < kernel; ++ky) {
                        for (int kx = 0; kx < kernel; ++kx) {
                            const int iy = mir(y * stride + ky - pad, in.height);
                            const int ix = mir(x * stride + kx - pad, in.width);
                            acc += w[((static_cast<std::size_t>(oc) * in.channels + ic) * kernel +
                                      ky) *
                                         kernel +
                                     kx] *
                                   in.at(ic, iy, ix);
                        }
                    }
                }
                out.at(oc, y, x) = acc;
            }
        }
    }
    return out;
}

Tensor3D random_tensor(Rng& rng, int c, int h, int w) {
    Tensor3D t(c, h, w);
    for (double& v : t.values) v = rng.uniform(-1.0, 1.0);
    return t;
}

// Finite-difference check of d(loss)/d(params) and d(loss)/d(input) for a
// small layer stack, loss = sum(output * projection).
double stack_fd_worst(const std::vector<LayerSpec>& layers_in, Tensor3D input, Rng& rng) {
    const std::vector<LayerSpec> layers = resolve_structure(layers_in);
    NetworkParams params = init_params(layers, input.channels, rng.uniform_int(1, 1 << 20));
    // jitter pooled values so argmax ties cannot flip under the FD step
    for (double& v : input.values) v += rng.uniform(-1e-3, 1e-3);

    ForwardTrace trace;
    const Tensor3D out0 = network_forward(layers, params, input, trace);
    Tensor3D proj(out0.channels, out0.height, out0.width);
    for (double& v : proj.values) v = rng.uniform(-1.0, 1.0);

    auto loss = [&](const NetworkParams& p, const Tensor3D& in) {
        ForwardTrace t;
        const Tensor3D out = network_forward(layers, p, in, t);
        double s = 0.0;
        for (std::size_t i = 0; i < out.values.size(); ++i) s += out.values[i] * proj.values[i];
        return s;
    };

    Tensor3D gin;
    NetworkParams grads = network_backward(layers, params, trace, proj, &gin);

    const double h = 1e-5;
    double worst = 0.0;
    auto compare = [&](double analytic, double fd) {
        worst = std::max(worst, rel_error(analytic, fd, 1e-6));
    };
    for (std::size_t li = 0; li < params.layers.size(); ++li) {
        for (std::size_t j = 0; j < params.layers[li].w.size(); ++j) {
            NetworkParams p = params;
            p.layers[li].w[j] += h;
            const double lp = loss(p, input);
            p.layers[li].w[j] -= 2.0 * h;
            compare(grads.layers[li].w[j], (lp - loss(p, input)) / (2.0 * h));
        }
        for (std::size_t j = 0; j < params.layers[li].b.size(); ++j) {
            NetworkParams p = params;
            p.layers[li].b[j] += h;
            const double lp = loss(p, input);
            p.layers[li].b[j] -= 2.0 * h;
            compare(grads.layers[li].b[j], (lp - loss(p, input)) / (2.0 * h));
        }
    }
    for (std::size_t j = 0; j < input.values.size(); ++j) {
        Tensor3D in = input;
        in.values[j] += h;
        const double lp = loss(params, in);
        in.values[j] -= 2.0 * h;
        compare(gin.values[j], (lp - loss(params, in)) / (2.0 * h));
    }
    return worst;
}

CheckResult check_layer_gradients() {
    Rng rng(201);
    double worst = 0.0;
    worst = std::max(worst, stack_fd_worst({LayerSpec::Conv(3, 3)}, random_tensor(rng, 2, 6, 6), rng));
    worst = std::max(worst,
                     stack_fd_worst({LayerSpec::Conv(2, 3, 2)}, random_tensor(rng, 2, 8, 8), rng));
    worst = std::max(worst, stack_fd_worst({LayerSpec::Relu()}, random_tensor(rng, 3, 5, 5), rng));
    worst = std::max(worst, stack_fd_worst({LayerSpec::MaxPool()}, random_tensor(rng, 2, 6, 6), rng));
    worst = std::max(worst, stack_fd_worst({LayerSpec::MaxPool(), LayerSpec::Deconv(3)},
                                           random_tensor(rng, 2, 8, 8), rng));
    worst = std::max(worst, stack_fd_worst({LayerSpec::Relu(), LayerSpec::SkipConcat(0)},
                                           random_tensor(rng, 2, 5, 5), rng));
    worst = std::max(worst,
                     stack_fd_worst({LayerSpec::LogisticHead()}, random_tensor(rng, 3, 5, 5), rng));
    return {"layer-gradients-fd", worst <= 1e-3, fmt("max rel err %.2e (limit 1e-3)", worst)};
}

CheckResult check_composite_gradient() {
    Rng rng(202);
    double worst = stack_fd_worst(
        {LayerSpec::Conv(3, 3), LayerSpec::Relu(), LayerSpec::LogisticHead()},
        random_tensor(rng, 1, 8, 8), rng);
    worst = std::max(
        worst, stack_fd_worst({LayerSpec::Conv(2, 3), LayerSpec::Relu(), LayerSpec::MaxPool(),
                               LayerSpec::Conv(2, 3), LayerSpec::Relu(), LayerSpec::Deconv(2),
                               LayerSpec::SkipConcat(1), LayerSpec::LogisticHead()},
                              random_tensor(rng, 1, 8, 8), rng));
    return {"composite-gradient-fd", worst <= 1e-3, fmt("max rel err %.2e (limit 1e-3)", worst)};
}

CheckResult check_conv_reference() {
    Rng rng(203);
    double worst = 0.0;
    for (int inst = 0; inst < 5; ++inst) {
        const Tensor3D in = random_tensor(rng, 2, 8, 8);
        std::vector<LayerSpec> layers = resolve_structure({LayerSpec::Conv(4, 3)});
        NetworkParams params = init_params(layers, 2, 300 + static_cast<std::uint64_t>(inst));
        ForwardTrace trace;
        const Tensor3D fast = network_forward(layers, params, in, trace);
        const Tensor3D ref = conv_reference(in, 4, 3, 1, params.layers[0].w, params.layers[0].b);
        for (std::size_t i = 0; i < fast.values.size(); ++i)
            worst = std::max(worst, std::abs(fast.values[i] - ref.values[i]));
    }
    return {"conv-vs-direct-sum", worst <= 1e-12, fmt("max abs diff %.2e (limit 1e-12)", worst)};
}

// -------------------------------------------------------------- distance

CheckResult check_edt_bruteforce() {
    Rng rng(301);
    long long worst = 0;
    for (int inst = 0; inst < 100; ++inst) {
        const Grid2D grid(32, 32);
        BinaryMask m(grid);
        if (inst == 0) {
            std::fill(m.values.begin(), m.values.end(), std::uint8_t{1});
        } else if (inst == 1) {
            // all zeros: leave as-is
        } else {
            m = random_mask(rng, grid, rng.uniform(0.05, 0.95));
        }
        const auto fast = edt_squared(m);
        const auto slow = edt_squared_bruteforce(m);
        for (std::size_t i = 0; i < fast.size(); ++i)
            worst = std::max(worst, std::abs(static_cast<long long>(fast[i] - slow[i])));
    }
    return {"edt-exactness", worst == 0,
            fmt("max squared-distance deviation %.0f (exact equality required)", double(worst))};
}

} // namespace

std::vector<std::int64_t> edt_squared_bruteforce(const BinaryMask& mask) {
    const int w = mask.grid.width, h = mask.grid.height;
    const std::int64_t cap = static_cast<std::int64_t>(w) * w + static_cast<std::int64_t>(h) * h;
    std::vector<std::pair<int, int>> background;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (mask.at(x, y) == 0) background.emplace_back(x, y);
    std::vector<std::int64_t> out(static_cast<std::size_t>(w) * h, cap);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::int64_t best = cap;
            for (const auto& [bx, by] : background) {
                const std::int64_t dx = x - bx, dy = y - by;
                best = std::min(best, dx * dx + dy * dy);
            }
            out[static_cast<std::size_t>(mask.grid.index(x, y))] = best;
        }
    }
    return out;
}

std::vector<CheckResult> run_levelset_checks() {
    return {check_heaviside_identities(), check_dirac_matches_dh(), check_energy_gradient_fd(),
            check_region_constant_stationarity(), check_energy_descent()};
}

std::vector<CheckResult> run_neuralnet_checks() {
    return {check_conv_reference(), check_layer_gradients(), check_composite_gradient()};
}

std::vector<CheckResult> run_distance_checks() { return {check_edt_bruteforce()}; }

std::vector<CheckResult> run_all_checks() {
    std::vector<CheckResult> all = run_levelset_checks();
    for (auto& c : run_neuralnet_checks()) all.push_back(std::move(c));
    for (auto& c : run_distance_checks()) all.push_back(std::move(c));
    return all;
}

} // namespace rlseg
