#pragma once

#include <string>
#include <vector>

#include "rlseg/field.hpp"

// Self-contained verification suites behind the `gradcheck` CLI command and
// the acceptance tests. Each check pits a fast implementation against an
// independent oracle: central finite differences for analytic gradients,
// quadruple-loop direct summation for convolution, an O(n^2 m) nearest-
// background scan for the distance transform. The oracles never call the
// code paths they certify.

namespace rlseg {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Heaviside/Dirac identities, energy gradient vs finite differences,
// region-constant stationarity, single-step energy descent.
std::vector<CheckResult> run_levelset_checks();

// Per-layer-kind and composite finite-difference gradient checks.
std::vector<CheckResult> run_neuralnet_checks();

// Exact squared-distance equality against the brute-force scan.
std::vector<CheckResult> run_distance_checks();

std::vector<CheckResult> run_all_checks();

// Brute-force oracle: per pixel, min squared distance over all background
// pixels (capped at w^2 + h^2 when none exist).
std::vector<std::int64_t> edt_squared_bruteforce(const BinaryMask& mask);

} // namespace rlseg
