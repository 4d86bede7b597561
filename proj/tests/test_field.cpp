#include "doctest.h"

#include <cmath>

#include "rlseg/field.hpp"
#include "rlseg/rng.hpp"

using namespace rlseg;

namespace {

ScalarField2D make_field(int w, int h, double spacing = 1.0) {
    return ScalarField2D(Grid2D(w, h, spacing));
}

// Random quadratic surface; central differences are exact on these.
struct Quadratic {
    double a, bx, by, cxx, cxy, cyy;
    double value(double x, double y) const {
        return a + bx * x + by * y + cxx * x * x + cxy * x * y + cyy * y * y;
    }
    double dx(double x, double y) const { return bx + 2.0 * cxx * x + cxy * y; }
    double dy(double x, double y) const { return by + 2.0 * cyy * y + cxy * x; }
};

} // namespace

TEST_SUITE("field") {

TEST_CASE("gradient of a constant field is zero") {
    ScalarField2D f = make_field(7, 5);
    for (double& v : f.values) v = 3.25;
    const VectorField2D g = gradient(f);
    for (std::size_t i = 0; i < g.dx.size(); ++i) {
        CHECK(g.dx[i] == 0.0);
        CHECK(g.dy[i] == 0.0);
    }
}

TEST_CASE("gradient of the linear ramp f = x") {
    ScalarField2D f = make_field(5, 5);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x) f.at(x, y) = x;
    const VectorField2D g = gradient(f);
    for (int y = 0; y < 5; ++y) {
        for (int x = 1; x < 4; ++x) {
            CHECK(g.dx[static_cast<std::size_t>(f.grid.index(x, y))] == doctest::Approx(1.0));
            CHECK(g.dy[static_cast<std::size_t>(f.grid.index(x, y))] == doctest::Approx(0.0));
        }
    }
}

TEST_CASE("gradient matches the analytic derivative on random quadratics") {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const Quadratic q{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                          rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        ScalarField2D f = make_field(8, 8);
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x) f.at(x, y) = q.value(x, y);
        const VectorField2D g = gradient(f);
        for (int y = 1; y < 7; ++y) {
            for (int x = 1; x < 7; ++x) {
                const std::size_t i = static_cast<std::size_t>(f.grid.index(x, y));
                CHECK(std::abs(g.dx[i] - q.dx(x, y)) <= 1e-10);
                CHECK(std::abs(g.dy[i] - q.dy(x, y)) <= 1e-10);
            }
        }
    }
}

TEST_CASE("gradient respects spacing") {
    ScalarField2D f = make_field(6, 6, 0.5);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 6; ++x) f.at(x, y) = 2.0 * x * 0.5; // f = 2 * physical x
    const VectorField2D g = gradient(f);
    CHECK(g.dx[static_cast<std::size_t>(f.grid.index(2, 2))] == doctest::Approx(2.0));
}

TEST_CASE("gradient is linear") {
    Rng rng(11);
    ScalarField2D f = make_field(9, 6), g2 = make_field(9, 6);
    for (double& v : f.values) v = rng.uniform(-2, 2);
    for (double& v : g2.values) v = rng.uniform(-2, 2);
    const double a = 1.7, b = -0.4;
    ScalarField2D combo = make_field(9, 6);
    for (std::size_t i = 0; i < combo.values.size(); ++i)
        combo.values[i] = a * f.values[i] + b * g2.values[i];
    const VectorField2D gf = gradient(f), gg = gradient(g2), gc = gradient(combo);
    for (std::size_t i = 0; i < gc.dx.size(); ++i) {
        CHECK(gc.dx[i] == doctest::Approx(a * gf.dx[i] + b * gg.dx[i]).epsilon(1e-12));
        CHECK(gc.dy[i] == doctest::Approx(a * gf.dy[i] + b * gg.dy[i]).epsilon(1e-12));
    }
}

TEST_CASE("divergence of a constant vector field is zero") {
    VectorField2D v(Grid2D(6, 6));
    for (std::size_t i = 0; i < v.dx.size(); ++i) {
        v.dx[i] = 2.0;
        v.dy[i] = -1.0;
    }
    const ScalarField2D d = divergence(v);
    for (double x : d.values) CHECK(x == 0.0);
}

TEST_CASE("divergence of (x, y) is 2 in the interior") {
    VectorField2D v(Grid2D(8, 8));
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            v.dx[static_cast<std::size_t>(v.grid.index(x, y))] = x;
            v.dy[static_cast<std::size_t>(v.grid.index(x, y))] = y;
        }
    }
    const ScalarField2D d = divergence(v);
    for (int y = 1; y < 7; ++y)
        for (int x = 1; x < 7; ++x) CHECK(d.at(x, y) == doctest::Approx(2.0));
}

TEST_CASE("divergence(gradient(f)) equals the wide 5-point Laplacian inside") {
    Rng rng(13);
    ScalarField2D f = make_field(10, 10);
    for (double& v : f.values) v = rng.uniform(-1, 1);
    const ScalarField2D lap = divergence(gradient(f));
    // Independent oracle: the +-2-neighbor 5-point stencil divided by (2h)^2.
    for (int y = 2; y < 8; ++y) {
        for (int x = 2; x < 8; ++x) {
            const double oracle = (f.at(x + 2, y) + f.at(x - 2, y) + f.at(x, y + 2) +
                                   f.at(x, y - 2) - 4.0 * f.at(x, y)) /
                                  4.0;
            CHECK(std::abs(lap.at(x, y) - oracle) <= 1e-12);
        }
    }
}

TEST_CASE("gradient_adjoint is the exact transpose of gradient") {
    Rng rng(17);
    for (double spacing : {1.0, 0.5}) {
        ScalarField2D f = make_field(9, 7, spacing);
        VectorField2D v(f.grid);
        for (double& x : f.values) x = rng.uniform(-1, 1);
        for (std::size_t i = 0; i < v.dx.size(); ++i) {
            v.dx[i] = rng.uniform(-1, 1);
            v.dy[i] = rng.uniform(-1, 1);
        }
        const VectorField2D gf = gradient(f);
        const ScalarField2D gtv = gradient_adjoint(v);
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            lhs += gf.dx[i] * v.dx[i] + gf.dy[i] * v.dy[i];
            rhs += f.values[i] * gtv.values[i];
        }
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("integrate basics") {
    ScalarField2D ones = make_field(4, 4);
    for (double& v : ones.values) v = 1.0;
    CHECK(integrate(ones) == doctest::Approx(16.0));

    ScalarField2D zeros = make_field(4, 4);
    CHECK(integrate(zeros) == 0.0);

    ScalarField2D ind = make_field(4, 4, 0.5);
    ind.at(0, 0) = ind.at(1, 2) = ind.at(3, 3) = 1.0;
    CHECK(integrate(ind) == doctest::Approx(0.75));
}

TEST_CASE("integrate is linear and monotone") {
    Rng rng(19);
    ScalarField2D f = make_field(6, 5), g = make_field(6, 5);
    for (double& v : f.values) v = rng.uniform(0, 1);
    for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = f.values[i] + rng.uniform(0, 1);
    CHECK(integrate(f) <= integrate(g));
    ScalarField2D combo = make_field(6, 5);
    for (std::size_t i = 0; i < combo.values.size(); ++i)
        combo.values[i] = 2.0 * f.values[i] - 3.0 * g.values[i];
    CHECK(integrate(combo) ==
          doctest::Approx(2.0 * integrate(f) - 3.0 * integrate(g)).epsilon(1e-12));
}

TEST_CASE("grid invariants are enforced") {
    CHECK_THROWS_AS(Grid2D(0, 4), ShapeError);
    CHECK_THROWS_AS(Grid2D(4, 4, 0.0), ConfigError);
    CHECK_THROWS_AS(Grid2D(4, -1), ShapeError);
}

} // TEST_SUITE
