#pragma once

#include <cstdint>

#include "p4ip/image.hpp"

namespace p4ip {

/// Rescales so the maximum pixel equals `peak` exactly.
/// The peak value sets the Poisson SNR of a subsequent sampling step.
/// Throws data_error for an all-zero image.
Image scale_to_peak(const Image& img, double peak);

/// Draws each pixel independently from Poisson(img[i]); a zero-intensity
/// pixel always yields zero counts. Deterministic for a fixed seed.
Image poisson_sample(const Image& img, std::uint64_t seed);

} // namespace p4ip
