#include "rlseg/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rlseg/rng.hpp"

namespace rlseg {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

void require_unit(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(what) + " must lie in [0, 1]");
}

} // namespace

void PhantomSpec::validate() const {
    if (width < 4 || height < 4) throw ConfigError("phantom grid must be at least 4x4");
    require_unit(fg_intensity, "fg_intensity");
    require_unit(bg_intensity, "bg_intensity");
    if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
    if (inhomogeneity_strength < 0.0) throw ConfigError("inhomogeneity_strength must be >= 0");
    const double half = 0.5 * std::min(width, height);
    double extent = radius;
    if (shape == PhantomShape::ellipse) extent = std::max(ellipse_a, ellipse_b);
    if (!(extent > 0.0)) throw ConfigError("phantom shape size must be > 0");
    if (extent >= half - 1.0) throw ConfigError("phantom shape does not fit inside the grid");
    if (shape == PhantomShape::blob) {
        if (blob_control_points < 3) throw ConfigError("blob needs at least 3 control points");
        if (!(blob_smoothness > 0.0)) throw ConfigError("blob_smoothness must be > 0");
    }
}

Phantom generate_phantom(const PhantomSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const Grid2D grid(spec.width, spec.height);
    const double cx = 0.5 * (spec.width - 1), cy = 0.5 * (spec.height - 1);

    // Blob boundary: control radii smoothed by a periodic von Mises kernel.
    std::vector<double> control;
    double kappa = 0.0;
    if (spec.shape == PhantomShape::blob) {
        control.resize(static_cast<std::size_t>(spec.blob_control_points));
        for (double& r : control) r = spec.radius * rng.uniform(0.55, 1.0);
        const double kernel_width = spec.blob_smoothness * kTwoPi / spec.blob_control_points;
        kappa = 1.0 / (kernel_width * kernel_width);
    }
    auto blob_radius = [&](double theta) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < control.size(); ++i) {
            const double ci = kTwoPi * static_cast<double>(i) / static_cast<double>(control.size());
            const double w = std::exp(kappa * (std::cos(theta - ci) - 1.0));
            num += w * control[i];
            den += w;
        }
        return num / den;
    };

    Phantom out;
    out.gt = BinaryMask(grid);
    out.image = ScalarField2D(grid);

    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            const double dx = x - cx, dy = y - cy;
            bool inside = false;
            switch (spec.shape) {
            case PhantomShape::disk:
                inside = dx * dx + dy * dy <= spec.radius * spec.radius;
                break;
            case PhantomShape::ellipse: {
                const double ca = std::cos(spec.ellipse_angle), sa = std::sin(spec.ellipse_angle);
                const double u = (dx * ca + dy * sa) / spec.ellipse_a;
                const double v = (-dx * sa + dy * ca) / spec.ellipse_b;
                inside = u * u + v * v <= 1.0;
                break;
            }
            case PhantomShape::blob: {
                const double rho = std::hypot(dx, dy);
                inside = rho <= blob_radius(std::atan2(dy, dx));
                break;
            }
            }
            out.gt.at(x, y) = inside ? 1 : 0;
        }
    }

    // Multiplicative low-frequency bias with random phases.
    const double px = rng.uniform(0.0, kTwoPi);
    const double py = rng.uniform(0.0, kTwoPi);
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            double v = out.gt.at(x, y) ? spec.fg_intensity : spec.bg_intensity;
            if (spec.inhomogeneity_strength > 0.0) {
                const double bias = std::sin(kTwoPi * x / spec.width + px) *
                                    std::sin(kTwoPi * y / spec.height + py);
                v *= 1.0 + spec.inhomogeneity_strength * bias;
            }
            if (spec.noise_sigma > 0.0) v += spec.noise_sigma * rng.normal();
            out.image.at(x, y) = std::clamp(v, 0.0, 1.0);
        }
    }
    return out;
}

} // namespace rlseg
