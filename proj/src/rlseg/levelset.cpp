#include "rlseg/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rlseg {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGradNormFloor = 1e-8;     // |grad phi| regularizer
constexpr double kRegionDenomFloor = 1e-12; // degenerate-region threshold
constexpr double kBaselineTol = 1e-3;       // max|delta phi| convergence test

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0)) throw ConfigError("heaviside epsilon must be > 0");
}

void require_gt(const BinaryMask* gt, const ScalarField2D& phi, double alpha) {
    if (alpha > 0.0 && gt == nullptr)
        throw ConfigError("ground truth required when alpha > 0");
    if (gt != nullptr) require_same_grid(gt->grid, phi.grid, "ground truth");
}

} // namespace

void EnergyWeights::validate() const {
    require_epsilon(epsilon);
    if (mu < 0.0) throw ConfigError("mu must be >= 0");
    if (alpha < 0.0) throw ConfigError("alpha must be >= 0");
    if (lambda1 < 0.0 || lambda2 < 0.0) throw ConfigError("lambda1/lambda2 must be >= 0");
}

void EvolutionConfig::validate() const {
    if (!(eta > 0.0)) throw ConfigError("eta must be > 0");
    if (inner_iters < 1) throw ConfigError("inner_iters must be >= 1");
    if (nsteps < 0) throw ConfigError("nsteps must be >= 0");
}

double heaviside(double tau, double epsilon) {
    require_epsilon(epsilon);
    if (tau < 0.0) return 1.0 - heaviside(-tau, epsilon);
    return 0.5 + std::atan(tau / epsilon) / kPi;
}

double dirac(double tau, double epsilon) {
    require_epsilon(epsilon);
    return epsilon / (kPi * (epsilon * epsilon + tau * tau));
}

double dirac_derivative(double tau, double epsilon) {
    require_epsilon(epsilon);
    const double d = epsilon * epsilon + tau * tau;
    return -2.0 * epsilon * tau / (kPi * d * d);
}

ScalarField2D heaviside_field(const ScalarField2D& phi, double epsilon) {
    ScalarField2D h(phi.grid);
    for (std::size_t i = 0; i < phi.values.size(); ++i) h.values[i] = heaviside(phi.values[i], epsilon);
    return h;
}

double contour_length(const ScalarField2D& phi, double epsilon) {
    const VectorField2D g = gradient(phi);
    double sum = 0.0;
    for (std::size_t i = 0; i < phi.values.size(); ++i) {
        const double mag = std::hypot(g.dx[i], g.dy[i]);
        sum += dirac(phi.values[i], epsilon) * mag;
    }
    return sum * phi.grid.spacing * phi.grid.spacing;
}

double contour_area(const ScalarField2D& phi, double epsilon) {
    double sum = 0.0;
    for (double v : phi.values) sum += heaviside(v, epsilon);
    return sum * phi.grid.spacing * phi.grid.spacing;
}

ScalarField2D data_field(const ScalarField2D& u, const ScalarField2D& phi, double epsilon,
                         DataFieldMode mode) {
    if (mode == DataFieldMode::as_written) return heaviside_field(phi, epsilon);
    require_same_grid(u.grid, phi.grid, "data field");
    return u;
}

RegionConstants region_constants(const ScalarField2D& u, const ScalarField2D& phi, double epsilon,
                                 DataFieldMode mode) {
    const ScalarField2D d = data_field(u, phi, epsilon, mode);
    double num1 = 0.0, den1 = 0.0, num2 = 0.0, den2 = 0.0;
    for (std::size_t i = 0; i < phi.values.size(); ++i) {
        const double h = heaviside(phi.values[i], epsilon);
        num1 += d.values[i] * h;
        den1 += h;
        num2 += d.values[i] * (1.0 - h);
        den2 += 1.0 - h;
    }
    if (den1 <= kRegionDenomFloor)
        throw DegenerateRegionError("inside region collapsed (integral of H ~ 0)");
    if (den2 <= kRegionDenomFloor)
        throw DegenerateRegionError("outside region collapsed (integral of 1-H ~ 0)");
    return {num1 / den1, num2 / den2};
}

double energy(const ScalarField2D& u, const ScalarField2D& phi, const BinaryMask* gt,
              const RegionConstants& c, const EnergyWeights& w, DataFieldMode mode) {
    w.validate();
    require_gt(gt, phi, w.alpha);
    const ScalarField2D d = data_field(u, phi, w.epsilon, mode);
    const VectorField2D g = gradient(phi);
    double sum = 0.0;
    for (std::size_t i = 0; i < phi.values.size(); ++i) {
        const double h = heaviside(phi.values[i], w.epsilon);
        const double mag = std::hypot(g.dx[i], g.dy[i]);
        double e = w.mu * h + w.nu * dirac(phi.values[i], w.epsilon) * mag;
        if (gt != nullptr && w.alpha > 0.0) {
            const double r = h - static_cast<double>(gt->values[i]);
            e += w.alpha * r * r;
        }
        const double r1 = d.values[i] - c.c1;
        const double r2 = d.values[i] - c.c2;
        e += w.lambda1 * r1 * r1 * h + w.lambda2 * r2 * r2 * (1.0 - h);
        sum += e;
    }
    return sum * phi.grid.spacing * phi.grid.spacing;
}

ScalarField2D energy_gradient_phi(const ScalarField2D& u, const ScalarField2D& phi,
                                  const BinaryMask* gt, const RegionConstants& c,
                                  const EnergyWeights& w, DataFieldMode mode) {
    w.validate();
    require_gt(gt, phi, w.alpha);
    const ScalarField2D d = data_field(u, phi, w.epsilon, mode);
    const double s2 = phi.grid.spacing * phi.grid.spacing;
    ScalarField2D out(phi.grid);

    // Pointwise terms: one dirac(phi) chain factor each.
    for (std::size_t i = 0; i < phi.values.size(); ++i) {
        const double h = heaviside(phi.values[i], w.epsilon);
        const double del = dirac(phi.values[i], w.epsilon);
        double bracket = w.mu;
        if (gt != nullptr && w.alpha > 0.0)
            bracket += 2.0 * w.alpha * (h - static_cast<double>(gt->values[i]));
        const double r1 = d.values[i] - c.c1;
        const double r2 = d.values[i] - c.c2;
        if (mode == DataFieldMode::as_written) {
            // d here is H(phi): the data terms differentiate through it.
            bracket += w.lambda1 * (r1 * r1 + 2.0 * r1 * h);
            bracket += w.lambda2 * (2.0 * r2 * (1.0 - h) - r2 * r2);
        } else {
            bracket += w.lambda1 * r1 * r1 - w.lambda2 * r2 * r2;
        }
        out.values[i] = del * bracket * s2;
    }

    // Length term nu * int(dirac(phi)*|grad phi|): exact discrete derivative
    //   nu*(dirac'(phi)*|g| + G^T[dirac(phi) * g/max(|g|, floor)]).
    if (w.nu != 0.0) {
        const VectorField2D g = gradient(phi);
        VectorField2D dn(phi.grid);
        for (std::size_t i = 0; i < phi.values.size(); ++i) {
            const double mag = std::hypot(g.dx[i], g.dy[i]);
            const double del = dirac(phi.values[i], w.epsilon);
            out.values[i] += w.nu * dirac_derivative(phi.values[i], w.epsilon) * mag * s2;
            const double inv = del / std::max(mag, kGradNormFloor);
            dn.dx[i] = g.dx[i] * inv;
            dn.dy[i] = g.dy[i] * inv;
        }
        const ScalarField2D adj = gradient_adjoint(dn);
        for (std::size_t i = 0; i < phi.values.size(); ++i)
            out.values[i] += w.nu * adj.values[i] * s2;
    }
    return out;
}

std::pair<double, double> energy_gradient_c(const ScalarField2D& u, const ScalarField2D& phi,
                                            const RegionConstants& c, const EnergyWeights& w,
                                            DataFieldMode mode) {
    const ScalarField2D d = data_field(u, phi, w.epsilon, mode);
    const double s2 = phi.grid.spacing * phi.grid.spacing;
    double g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < phi.values.size(); ++i) {
        const double h = heaviside(phi.values[i], w.epsilon);
        g1 += (d.values[i] - c.c1) * h;
        g2 += (d.values[i] - c.c2) * (1.0 - h);
    }
    return {-2.0 * w.lambda1 * g1 * s2, -2.0 * w.lambda2 * g2 * s2};
}

ScalarField2D energy_gradient_data(const ScalarField2D& u, const ScalarField2D& phi,
                                   const RegionConstants& c, const EnergyWeights& w,
                                   DataFieldMode mode) {
    ScalarField2D out(phi.grid, 0.0);
    if (mode == DataFieldMode::as_written) return out;
    require_same_grid(u.grid, phi.grid, "energy_gradient_data");
    const double s2 = phi.grid.spacing * phi.grid.spacing;
    for (std::size_t i = 0; i < phi.values.size(); ++i) {
        const double h = heaviside(phi.values[i], w.epsilon);
        out.values[i] = (2.0 * w.lambda1 * (u.values[i] - c.c1) * h +
                         2.0 * w.lambda2 * (u.values[i] - c.c2) * (1.0 - h)) *
                        s2;
    }
    return out;
}

ScalarField2D curvature(const ScalarField2D& phi) {
    VectorField2D g = gradient(phi);
    for (std::size_t i = 0; i < g.dx.size(); ++i) {
        const double mag = std::hypot(g.dx[i], g.dy[i]);
        const double inv = 1.0 / std::max(mag, kGradNormFloor);
        g.dx[i] *= inv;
        g.dy[i] *= inv;
    }
    return divergence(g);
}

ScalarField2D evolution_step(const ScalarField2D& phi, const ScalarField2D& u, const BinaryMask* gt,
                             const RegionConstants& c, const EnergyWeights& w,
                             const EvolutionConfig& cfg) {
    w.validate();
    cfg.validate();
    if (cfg.include_supervision_in_evolution) require_gt(gt, phi, w.alpha);
    const ScalarField2D d = data_field(u, phi, w.epsilon, cfg.data_field_mode);
    const ScalarField2D kappa = curvature(phi);
    ScalarField2D next(phi.grid);
    for (std::size_t i = 0; i < phi.values.size(); ++i) {
        const double h = heaviside(phi.values[i], w.epsilon);
        const double r1 = d.values[i] - c.c1;
        const double r2 = d.values[i] - c.c2;
        double velocity = -w.mu + w.nu * kappa.values[i];
        if (cfg.data_field_mode == DataFieldMode::as_written) {
            velocity += -w.lambda1 * (r1 * r1 + 2.0 * r1 * h);
            velocity += w.lambda2 * (r2 * r2 - 2.0 * r2 * (1.0 - h));
        } else {
            velocity += -w.lambda1 * r1 * r1 + w.lambda2 * r2 * r2;
        }
        if (cfg.include_supervision_in_evolution && gt != nullptr && w.alpha > 0.0)
            velocity -= 2.0 * w.alpha * (h - static_cast<double>(gt->values[i]));
        next.values[i] = phi.values[i] + cfg.eta * dirac(phi.values[i], w.epsilon) * velocity;
    }
    return next;
}

SegmentationResult chan_vese_segment(const ScalarField2D& image, const ScalarField2D& phi0,
                                     const EnergyWeights& w, const EvolutionConfig& cfg,
                                     int max_iters) {
    require_same_grid(image.grid, phi0.grid, "chan_vese_segment");
    if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
    EvolutionConfig baseline = cfg;
    baseline.data_field_mode = DataFieldMode::feature_map;
    baseline.include_supervision_in_evolution = false;
    ScalarField2D phi = phi0;
    int iter = 0;
    while (iter < max_iters) {
        const RegionConstants c =
            region_constants(image, phi, w.epsilon, DataFieldMode::feature_map);
        ScalarField2D next = evolution_step(phi, image, nullptr, c, w, baseline);
        ++iter;
        double delta = 0.0;
        for (std::size_t i = 0; i < phi.values.size(); ++i)
            delta = std::max(delta, std::abs(next.values[i] - phi.values[i]));
        phi = std::move(next);
        if (delta < kBaselineTol) break;
    }
    return {predict_mask(phi), phi, iter};
}

ScalarField2D initialize_phi(const Grid2D& grid, PhiInit kind, double size_param) {
    ScalarField2D phi(grid);
    if (kind == PhiInit::centered_circle) {
        const double radius = size_param;
        if (!(radius > 0.0) || radius >= 0.5 * std::min(grid.width, grid.height))
            throw ConfigError("circle radius must be positive and fit inside the grid");
        const double cx = grid.width / 2, cy = grid.height / 2;
        for (int y = 0; y < grid.height; ++y)
            for (int x = 0; x < grid.width; ++x)
                phi.at(x, y) = radius - std::hypot(x - cx, y - cy);
    } else {
        const double period = size_param;
        if (!(period > 0.0) || period >= std::min(grid.width, grid.height))
            throw ConfigError("checkerboard period must be positive and fit inside the grid");
        for (int y = 0; y < grid.height; ++y)
            for (int x = 0; x < grid.width; ++x)
                phi.at(x, y) = std::sin(kPi * x / period) * std::sin(kPi * y / period);
    }
    return phi;
}

BinaryMask predict_mask(const ScalarField2D& phi) {
    BinaryMask mask(phi.grid);
    for (std::size_t i = 0; i < phi.values.size(); ++i)
        mask.values[i] = phi.values[i] >= 0.0 ? 1 : 0;
    return mask;
}

} // namespace rlseg
