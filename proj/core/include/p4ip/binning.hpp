#pragma once

#include "p4ip/image.hpp"

namespace p4ip {

/// Sums factor x factor blocks into one pixel, so photon counts add and the
/// SNR of the smaller image improves. Trailing rows/columns that do not fill
/// a whole block are cropped. factor == 1 is the identity.
Image bin_down(const Image& img, int factor = 3);

/// Bilinear interpolation to (out_width, out_height), then division by
/// factor^2 to return the summed-count scale to per-pixel intensities.
/// factor == 1 with matching target dimensions is the identity.
Image bin_up(const Image& img, int factor, int out_width, int out_height);

} // namespace p4ip
