#pragma once

#include <string>

#include "p4ip/image.hpp"

namespace p4ip {

/// 8-byte magic that opens every raster interchange file.
inline constexpr char kRasterMagic[8] = {'P', 'N', 'P', 'R', 'A', 'S', 'T', '1'};

/// Writes the raster interchange format: magic, two u32 little-endian
/// dimensions (width, height), then width*height f64 little-endian values
/// row-major. Round-trips bit-exactly.
void save_raster(const Image& img, const std::string& path);
Image load_raster(const std::string& path);

/// Reads binary (P5) or ASCII (P2) PGM, 8- or 16-bit. Sample values are
/// converted to doubles unchanged in magnitude.
Image load_pgm(const std::string& path);

} // namespace p4ip
