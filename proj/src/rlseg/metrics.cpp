#include "rlseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace rlseg {

namespace {

struct Counts {
    long long p = 0, t = 0, both = 0, neither = 0;
};

Counts overlap_counts(const BinaryMask& p, const BinaryMask& t) {
    require_same_grid(p.grid, t.grid, "metrics");
    Counts c;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        const bool pi = p.values[i] != 0, ti = t.values[i] != 0;
        c.p += pi;
        c.t += ti;
        c.both += pi && ti;
        c.neither += !pi && !ti;
    }
    return c;
}

std::vector<std::pair<int, int>> boundary_pixels(const BinaryMask& m) {
    std::vector<std::pair<int, int>> out;
    const int w = m.grid.width, h = m.grid.height;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::uint8_t v = m.at(x, y);
            const bool edge = (x > 0 && m.at(x - 1, y) != v) || (x < w - 1 && m.at(x + 1, y) != v) ||
                              (y > 0 && m.at(x, y - 1) != v) || (y < h - 1 && m.at(x, y + 1) != v);
            if (edge && v != 0) out.emplace_back(x, y);
        }
    }
    return out;
}

void directed_distances(const std::vector<std::pair<int, int>>& from,
                        const std::vector<std::pair<int, int>>& to, double spacing,
                        std::vector<double>& out) {
    for (const auto& [ax, ay] : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [bx, by] : to) {
            const double dx = ax - bx, dy = ay - by;
            best = std::min(best, dx * dx + dy * dy);
        }
        out.push_back(std::sqrt(best) * spacing);
    }
}

} // namespace

double dice(const BinaryMask& p, const BinaryMask& t) {
    const Counts c = overlap_counts(p, t);
    if (c.p + c.t == 0) throw UndefinedMetricError("dice undefined: both masks empty");
    return 2.0 * static_cast<double>(c.both) / static_cast<double>(c.p + c.t);
}

double sensitivity(const BinaryMask& p, const BinaryMask& t) {
    const Counts c = overlap_counts(p, t);
    if (c.t == 0) throw UndefinedMetricError("sensitivity undefined: ground truth empty");
    return static_cast<double>(c.both) / static_cast<double>(c.t);
}

double specificity(const BinaryMask& p, const BinaryMask& t) {
    const Counts c = overlap_counts(p, t);
    if (c.t == static_cast<long long>(t.values.size()))
        throw UndefinedMetricError("specificity undefined: ground truth covers the grid");
    return static_cast<double>(c.neither) /
           static_cast<double>(static_cast<long long>(t.values.size()) - c.t);
}

double hausdorff95(const BinaryMask& p, const BinaryMask& t) {
    require_same_grid(p.grid, t.grid, "hausdorff95");
    const auto bp = boundary_pixels(p);
    const auto bt = boundary_pixels(t);
    if (bp.empty() || bt.empty())
        throw UndefinedMetricError("hausdorff95 undefined: a mask has no boundary pixels");
    std::vector<double> d;
    d.reserve(bp.size() + bt.size());
    directed_distances(bp, bt, p.grid.spacing, d);
    directed_distances(bt, bp, p.grid.spacing, d);
    std::sort(d.begin(), d.end());
    const std::size_t rank =
        static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(d.size())));
    return d[std::max<std::size_t>(rank, 1) - 1];
}

MetricSummary EvalReport::summarize(std::optional<double> CaseMetrics::* metric) const {
    MetricSummary s;
    double sum = 0.0;
    for (const auto& c : cases) {
        if ((c.*metric).has_value()) {
            sum += *(c.*metric);
            ++s.count;
        }
    }
    if (s.count == 0) return s;
    s.mean = sum / s.count;
    double sq = 0.0;
    for (const auto& c : cases) {
        if ((c.*metric).has_value()) {
            const double r = *(c.*metric) - s.mean;
            sq += r * r;
        }
    }
    s.stddev = s.count > 1 ? std::sqrt(sq / (s.count - 1)) : 0.0;
    return s;
}

void EvalReport::write_csv(std::ostream& out) const {
    auto cell = [](std::optional<double> v) {
        if (!v.has_value()) return std::string();
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", *v);
        return std::string(buf);
    };
    out << "case,dice,sensitivity,specificity";
    if (with_hausdorff) out << ",hausdorff95";
    out << "\n";
    for (const auto& c : cases) {
        out << c.id << ',' << cell(c.dice) << ',' << cell(c.sensitivity) << ','
            << cell(c.specificity);
        if (with_hausdorff) out << ',' << cell(c.hausdorff95);
        out << "\n";
    }
    auto row = [&](const char* name, double MetricSummary::* part) {
        out << name << ',' << cell(summarize(&CaseMetrics::dice).*part) << ','
            << cell(summarize(&CaseMetrics::sensitivity).*part) << ','
            << cell(summarize(&CaseMetrics::specificity).*part);
        if (with_hausdorff) out << ',' << cell(summarize(&CaseMetrics::hausdorff95).*part);
        out << "\n";
    };
    row("MEAN", &MetricSummary::mean);
    row("STD", &MetricSummary::stddev);
}

} // namespace rlseg
