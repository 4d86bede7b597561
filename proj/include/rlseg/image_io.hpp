#pragma once

#include <string>

#include "rlseg/field.hpp"

// File formats:
//  - PGM (binary P5, 8-bit) and PNG (8-bit grayscale) for images and masks;
//    pixel values map to [0, 1] by /255.
//  - "LSF1" raw float fields: 16-byte header (magic 'LSF1', u32 width,
//    u32 height, u32 reserved=0, little-endian) + row-major 32-bit floats.
//    Round-trips are bitwise for float-representable values.
//  - Heatmap PNGs: diverging blue-white-red colormap centered at zero with
//    the zero level set overdrawn in green.
// Malformed inputs raise ParseError with the offending byte offset.

namespace rlseg {

// Dispatches on extension: .pgm, .png, .lsf
ScalarField2D load_image(const std::string& path);
void save_image(const std::string& path, const ScalarField2D& field);

// Masks store 0 -> 0 and 1 -> 255; loading thresholds at 128.
BinaryMask load_mask(const std::string& path);
void save_mask(const std::string& path, const BinaryMask& mask);

ScalarField2D load_field_lsf(const std::string& path);
void save_field_lsf(const std::string& path, const ScalarField2D& field);

ScalarField2D load_pgm(const std::string& path);
void save_pgm(const std::string& path, const ScalarField2D& field);

ScalarField2D load_png_gray(const std::string& path);
void save_png_gray(const std::string& path, const ScalarField2D& field);

// RGB rows, 3 bytes per pixel; used by the heatmap writer and its tests.
void save_png_rgb(const std::string& path, int width, int height,
                  const std::vector<std::uint8_t>& rgb);
std::vector<std::uint8_t> load_png_rgb(const std::string& path, int& width, int& height);

void emit_heatmap(const ScalarField2D& field, const std::string& path);

} // namespace rlseg
