#pragma once

#include <cstdint>
#include <vector>

#include "rlseg/error.hpp"

// Grid containers and the discrete differential operators shared by the
// numerical modules.
//
// Storage convention (used everywhere): row-major, index = y * width + x,
// with (x, y) = (column, row). Border policy: `gradient` falls back to
// one-sided differences at the borders; `divergence` mirrors across them
// (reflect-101, i.e. index -1 maps to 1), which keeps boundary level lines
// free of spurious curvature.

namespace rlseg {

struct Grid2D {
    int width = 0;
    int height = 0;
    double spacing = 1.0;

    Grid2D() = default;
    Grid2D(int w, int h, double s = 1.0) : width(w), height(h), spacing(s) {
        if (w < 1 || h < 1) throw ShapeError("grid dimensions must be >= 1");
        if (!(s > 0.0)) throw ConfigError("grid spacing must be > 0");
    }

    int count() const { return width * height; }
    int index(int x, int y) const { return y * width + x; }
    bool operator==(const Grid2D& o) const {
        return width == o.width && height == o.height && spacing == o.spacing;
    }
};

struct ScalarField2D {
    Grid2D grid;
    std::vector<double> values;

    ScalarField2D() = default;
    explicit ScalarField2D(const Grid2D& g, double fill = 0.0)
        : grid(g), values(static_cast<std::size_t>(g.count()), fill) {}

    double& at(int x, int y) { return values[static_cast<std::size_t>(grid.index(x, y))]; }
    double at(int x, int y) const { return values[static_cast<std::size_t>(grid.index(x, y))]; }
};

struct BinaryMask {
    Grid2D grid;
    std::vector<std::uint8_t> values; // each 0 or 1

    BinaryMask() = default;
    explicit BinaryMask(const Grid2D& g, std::uint8_t fill = 0)
        : grid(g), values(static_cast<std::size_t>(g.count()), fill) {}

    std::uint8_t& at(int x, int y) { return values[static_cast<std::size_t>(grid.index(x, y))]; }
    std::uint8_t at(int x, int y) const { return values[static_cast<std::size_t>(grid.index(x, y))]; }
};

struct VectorField2D {
    Grid2D grid;
    std::vector<double> dx;
    std::vector<double> dy;

    VectorField2D() = default;
    explicit VectorField2D(const Grid2D& g)
        : grid(g),
          dx(static_cast<std::size_t>(g.count()), 0.0),
          dy(static_cast<std::size_t>(g.count()), 0.0) {}
};

void require_same_grid(const Grid2D& a, const Grid2D& b, const char* what);

// Central differences in the interior, one-sided at the borders.
VectorField2D gradient(const ScalarField2D& f);

// Exact transpose of `gradient` under the plain pixel-sum inner product:
// sum(gradient(f) . v) == sum(f * gradient_adjoint(v)) for all f, v.
ScalarField2D gradient_adjoint(const VectorField2D& v);

// Central differences with mirrored (reflect-101) borders.
ScalarField2D divergence(const VectorField2D& v);

// Riemann sum: sum of values times spacing^2.
double integrate(const ScalarField2D& f);

} // namespace rlseg
