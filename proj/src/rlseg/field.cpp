#include "rlseg/field.hpp"

#include <string>

namespace rlseg {

void require_same_grid(const Grid2D& a, const Grid2D& b, const char* what) {
    if (!(a == b)) {
        throw ShapeError(std::string(what) + ": grid mismatch (" + std::to_string(a.width) + "x" +
                         std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                         std::to_string(b.height) + ")");
    }
}

namespace {

// reflect-101 mirror: ... 2 1 | 0 1 2 ... n-1 | n-2 n-3 ...
inline int mirror(int i, int n) {
    if (n == 1) return 0;
    if (i < 0) return -i;
    if (i >= n) return 2 * n - 2 - i;
    return i;
}

} // namespace

VectorField2D gradient(const ScalarField2D& f) {
    const int w = f.grid.width, h = f.grid.height;
    const double inv2s = 1.0 / (2.0 * f.grid.spacing);
    const double invs = 1.0 / f.grid.spacing;
    VectorField2D g(f.grid);
    for (int y = 0; y < h; ++y) {
        const double* row = f.values.data() + static_cast<std::size_t>(y) * w;
        double* gx = g.dx.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            if (w == 1)
                gx[x] = 0.0;
            else if (x == 0)
                gx[x] = (row[1] - row[0]) * invs;
            else if (x == w - 1)
                gx[x] = (row[w - 1] - row[w - 2]) * invs;
            else
                gx[x] = (row[x + 1] - row[x - 1]) * inv2s;
        }
    }
    for (int y = 0; y < h; ++y) {
        double* gy = g.dy.data() + static_cast<std::size_t>(y) * w;
        const double* up = f.values.data() + static_cast<std::size_t>((y == 0 ? 0 : y - 1)) * w;
        const double* dn =
            f.values.data() + static_cast<std::size_t>((y == h - 1 ? h - 1 : y + 1)) * w;
        const double scale = (h == 1) ? 0.0 : ((y == 0 || y == h - 1) ? invs : inv2s);
        for (int x = 0; x < w; ++x) gy[x] = (dn[x] - up[x]) * scale;
    }
    return g;
}

ScalarField2D gradient_adjoint(const VectorField2D& v) {
    const int w = v.grid.width, h = v.grid.height;
    const double inv2s = 1.0 / (2.0 * v.grid.spacing);
    const double invs = 1.0 / v.grid.spacing;
    ScalarField2D out(v.grid, 0.0);
    // Scatter each forward-stencil coefficient to its source pixel.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = v.dx[static_cast<std::size_t>(v.grid.index(x, y))];
            if (w == 1) continue;
            if (x == 0) {
                out.at(1, y) += gx * invs;
                out.at(0, y) -= gx * invs;
            } else if (x == w - 1) {
                out.at(w - 1, y) += gx * invs;
                out.at(w - 2, y) -= gx * invs;
            } else {
                out.at(x + 1, y) += gx * inv2s;
                out.at(x - 1, y) -= gx * inv2s;
            }
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gy = v.dy[static_cast<std::size_t>(v.grid.index(x, y))];
            if (h == 1) continue;
            if (y == 0) {
                out.at(x, 1) += gy * invs;
                out.at(x, 0) -= gy * invs;
            } else if (y == h - 1) {
                out.at(x, h - 1) += gy * invs;
                out.at(x, h - 2) -= gy * invs;
            } else {
                out.at(x, y + 1) += gy * inv2s;
                out.at(x, y - 1) -= gy * inv2s;
            }
        }
    }
    return out;
}

ScalarField2D divergence(const VectorField2D& v) {
    const int w = v.grid.width, h = v.grid.height;
    const double inv2s = 1.0 / (2.0 * v.grid.spacing);
    ScalarField2D out(v.grid);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double ddx = (v.dx[static_cast<std::size_t>(v.grid.index(mirror(x + 1, w), y))] -
                                v.dx[static_cast<std::size_t>(v.grid.index(mirror(x - 1, w), y))]) *
                               inv2s;
            const double ddy = (v.dy[static_cast<std::size_t>(v.grid.index(x, mirror(y + 1, h)))] -
                                v.dy[static_cast<std::size_t>(v.grid.index(x, mirror(y - 1, h)))]) *
                               inv2s;
            out.at(x, y) = ddx + ddy;
        }
    }
    return out;
}

double integrate(const ScalarField2D& f) {
    double sum = 0.0;
    for (double v : f.values) sum += v;
    return sum * f.grid.spacing * f.grid.spacing;
}

} // namespace rlseg
