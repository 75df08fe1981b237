#pragma once

#include "p4ip/image.hpp"

namespace p4ip {

/// Mean squared error over all pixels. Dimensions must match.
double mse(const Image& reference, const Image& test);

/// 10*log10(peak_max^2 / MSE) in dB, computed in the reference's intensity
/// scale. Identical images yield +infinity. `peak_max` is normally the peak
/// used to generate the degraded image, which keeps results comparable
/// across peak levels.
double psnr(const Image& reference, const Image& test, double peak_max);

} // namespace p4ip
