#pragma once

#include <cstdint>

#include "rlseg/field.hpp"

// Synthetic phantoms with known ground truth: a rasterized shape (disk,
// ellipse, or smooth blob) over a flat background, optionally shaded by a
// low-frequency multiplicative bias field and corrupted by clamped Gaussian
// noise. Deterministic per seed.

namespace rlseg {

enum class PhantomShape { disk, ellipse, blob };

struct PhantomSpec {
    int width = 64;
    int height = 64;
    PhantomShape shape = PhantomShape::disk;
    double radius = 12.0;       // disk; blob base radius
    double ellipse_a = 16.0;    // ellipse semi-axes and rotation
    double ellipse_b = 10.0;
    double ellipse_angle = 0.0; // radians
    int blob_control_points = 8;
    double blob_smoothness = 1.0; // angular kernel width in control spacings
    double fg_intensity = 0.75;   // in [0, 1]
    double bg_intensity = 0.25;   // in [0, 1]
    double noise_sigma = 0.0;
    double inhomogeneity_strength = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Phantom {
    ScalarField2D image; // values in [0, 1]
    BinaryMask gt;
};

Phantom generate_phantom(const PhantomSpec& spec);

} // namespace rlseg
