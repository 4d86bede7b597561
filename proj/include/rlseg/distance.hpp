#pragma once

#include <cstdint>
#include <vector>

#include "rlseg/field.hpp"

// Exact Euclidean distance transform and the feature-map -> level-set
// conversion phi = edt(b) - edt(1-b), normalized into [-0.5, 0.5].

namespace rlseg {

// Squared distance from each pixel to the nearest pixel where mask == 0,
// exact (two-pass lower-envelope method on integer squared distances).
// Zero on background pixels. A mask with no background pixels yields the
// capped value width^2 + height^2 everywhere.
std::vector<std::int64_t> edt_squared(const BinaryMask& mask);

// sqrt of edt_squared; all-ones masks yield the grid diagonal everywhere.
ScalarField2D edt(const BinaryMask& mask);

enum class LevelSetNormalization {
    max_abs,         // divide by max|raw| (full [-0.5, 0.5] dynamic range)
    clamp_halfwidth, // divide by the grid half-diagonal, clamp to [-0.5, 0.5]
};

struct ConversionOptions {
    double binarize_threshold = 0.5; // strictly inside (0, 1)
    LevelSetNormalization normalization = LevelSetNormalization::max_abs;
    double degenerate_value = 0.5; // level used when the mask is all fg / all bg

    void validate() const;
};

// b = (y >= threshold); phi = normalize(edt(b) - edt(1-b)).
// phi > 0 exactly on b's support; output always within [-0.5, 0.5].
// All-foreground input yields +degenerate_value, all-background the negative.
// Rejects y values outside [0, 1].
ScalarField2D to_levelset(const ScalarField2D& y, const ConversionOptions& opts);

} // namespace rlseg
