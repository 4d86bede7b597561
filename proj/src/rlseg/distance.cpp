#include "rlseg/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rlseg {

namespace {

// 1-D squared-distance lower envelope (Felzenszwalb–Huttenlocher). f holds
// squared distances per sample; out gets min_v (q - v)^2 + f(v).
void envelope_pass(const std::int64_t* f, std::int64_t* out, int n, std::vector<int>& v,
                   std::vector<double>& z) {
    v.resize(static_cast<std::size_t>(n));
    z.resize(static_cast<std::size_t>(n) + 1);
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s;
        for (;;) {
            const int p = v[static_cast<std::size_t>(k)];
            s = (static_cast<double>(f[q] - f[p]) + static_cast<double>(q) * q -
                 static_cast<double>(p) * p) /
                (2.0 * (q - p));
            if (s > z[static_cast<std::size_t>(k)]) break;
            --k;
        }
        ++k;
        v[static_cast<std::size_t>(k)] = q;
        z[static_cast<std::size_t>(k)] = s;
        z[static_cast<std::size_t>(k) + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[static_cast<std::size_t>(k) + 1] < q) ++k;
        const std::int64_t p = v[static_cast<std::size_t>(k)];
        const std::int64_t dq = q - p;
        out[q] = dq * dq + f[p];
    }
}

} // namespace

std::vector<std::int64_t> edt_squared(const BinaryMask& mask) {
    const int w = mask.grid.width, h = mask.grid.height;
    const std::int64_t cap = static_cast<std::int64_t>(w) * w + static_cast<std::int64_t>(h) * h;
    std::vector<std::int64_t> dist(static_cast<std::size_t>(w) * h);

    // Column pass: squared distance to the nearest background row per column.
    for (int x = 0; x < w; ++x) {
        int last = -1;
        for (int y = 0; y < h; ++y) {
            if (mask.at(x, y) == 0) last = y;
            std::int64_t d = (last < 0) ? cap : static_cast<std::int64_t>(y - last) * (y - last);
            dist[static_cast<std::size_t>(mask.grid.index(x, y))] = d;
        }
        last = -1;
        for (int y = h - 1; y >= 0; --y) {
            if (mask.at(x, y) == 0) last = y;
            if (last >= 0) {
                const std::int64_t d = static_cast<std::int64_t>(last - y) * (last - y);
                auto& cell = dist[static_cast<std::size_t>(mask.grid.index(x, y))];
                cell = std::min(cell, d);
            }
        }
    }

    // Row pass: lower envelope over columns.
    std::vector<std::int64_t> f(static_cast<std::size_t>(w));
    std::vector<std::int64_t> row(static_cast<std::size_t>(w));
    std::vector<int> v;
    std::vector<double> z;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f[static_cast<std::size_t>(x)] = dist[static_cast<std::size_t>(mask.grid.index(x, y))];
        envelope_pass(f.data(), row.data(), w, v, z);
        for (int x = 0; x < w; ++x)
            dist[static_cast<std::size_t>(mask.grid.index(x, y))] = std::min(row[static_cast<std::size_t>(x)], cap);
    }
    return dist;
}

ScalarField2D edt(const BinaryMask& mask) {
    const std::vector<std::int64_t> sq = edt_squared(mask);
    ScalarField2D out(mask.grid);
    for (std::size_t i = 0; i < sq.size(); ++i) out.values[i] = std::sqrt(static_cast<double>(sq[i]));
    return out;
}

void ConversionOptions::validate() const {
    if (!(binarize_threshold > 0.0 && binarize_threshold < 1.0))
        throw ConfigError("binarize_threshold must lie strictly inside (0, 1)");
}

ScalarField2D to_levelset(const ScalarField2D& y, const ConversionOptions& opts) {
    opts.validate();
    for (double v : y.values) {
        if (!(v >= 0.0 && v <= 1.0))
            throw ConfigError("to_levelset input must lie in [0, 1]");
    }
    BinaryMask fg(y.grid);
    BinaryMask bg(y.grid);
    int fg_count = 0;
    for (std::size_t i = 0; i < y.values.size(); ++i) {
        const bool on = y.values[i] >= opts.binarize_threshold;
        fg.values[i] = on ? 1 : 0;
        bg.values[i] = on ? 0 : 1;
        fg_count += on ? 1 : 0;
    }
    ScalarField2D phi(y.grid);
    if (fg_count == y.grid.count() || fg_count == 0) {
        const double level = fg_count == 0 ? -opts.degenerate_value : opts.degenerate_value;
        std::fill(phi.values.begin(), phi.values.end(), level);
        return phi;
    }
    const ScalarField2D inside = edt(fg);
    const ScalarField2D outside = edt(bg);
    double max_abs = 0.0;
    for (std::size_t i = 0; i < phi.values.size(); ++i) {
        phi.values[i] = inside.values[i] - outside.values[i];
        max_abs = std::max(max_abs, std::abs(phi.values[i]));
    }
    if (opts.normalization == LevelSetNormalization::max_abs) {
        const double scale = 0.5 / max_abs; // max_abs >= 1 for non-degenerate masks
        for (double& v : phi.values) v *= scale;
    } else {
        const double half_diag = 0.5 * std::hypot(y.grid.width, y.grid.height);
        for (double& v : phi.values) v = std::clamp(v / half_diag, -0.5, 0.5);
    }
    return phi;
}

} // namespace rlseg
