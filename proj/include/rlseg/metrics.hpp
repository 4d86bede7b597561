#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rlseg/field.hpp"

// Binary-mask overlap metrics and the per-case evaluation report.

namespace rlseg {

// 2|P&T| / (|P|+|T|). Undefined when both masks are empty.
double dice(const BinaryMask& p, const BinaryMask& t);

// |P&T| / |T|. Undefined when T is empty.
double sensitivity(const BinaryMask& p, const BinaryMask& t);

// |P'&T'| / |T'| on complements. Undefined when T covers the grid.
double specificity(const BinaryMask& p, const BinaryMask& t);

// 95th percentile (nearest-rank) of the pooled symmetric nearest
// boundary-to-boundary distances; boundaries are pixels with a 4-neighbor of
// opposite value. Undefined when either boundary is empty.
double hausdorff95(const BinaryMask& p, const BinaryMask& t);

struct CaseMetrics {
    std::string id;
    std::optional<double> dice;
    std::optional<double> sensitivity;
    std::optional<double> specificity;
    std::optional<double> hausdorff95;
    std::string skip_reason; // set when any metric is undefined
};

struct MetricSummary {
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation (n-1), 0 for n < 2
    int count = 0;
};

// Rows stay ordered by case id; undefined metrics are skipped in aggregates
// (never coerced to 0 or 1).
struct EvalReport {
    std::vector<CaseMetrics> cases;
    bool with_hausdorff = false;

    MetricSummary summarize(std::optional<double> CaseMetrics::* metric) const;

    // header `case,dice,sensitivity,specificity[,hausdorff95]`, one row per
    // case, then MEAN and STD rows; fixed 6-decimal formatting.
    void write_csv(std::ostream& out) const;
};

} // namespace rlseg
