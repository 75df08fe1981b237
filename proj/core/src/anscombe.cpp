#include "p4ip/anscombe.hpp"

#include <cmath>

#include "p4ip/errors.hpp"

namespace p4ip {

namespace {

Image map_pixels(const Image& img, double (*f)(double)) {
    Image out(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        out.data[i] = f(img.data[i]);
    }
    return out;
}

} // namespace

double anscombe_forward(double y) { return 2.0 * std::sqrt(y + 0.375); }

Image anscombe_forward(const Image& img) {
    require_nonnegative(img, "anscombe_forward input");
    return map_pixels(img, &anscombe_forward);
}

double anscombe_inverse_algebraic(double t) {
    const double half = t / 2.0;
    return half * half - 0.375;
}

Image anscombe_inverse_algebraic(const Image& img) {
    return map_pixels(img, &anscombe_inverse_algebraic);
}

double anscombe_inverse_unbiased(double t) {
    const double t_min = 2.0 * std::sqrt(0.375);
    if (t < t_min) {
        t = t_min;
    }
    const double sqrt32 = std::sqrt(1.5);
    const double half = t / 2.0;
    return half * half - 0.125 + (sqrt32 / 4.0) / t - 1.375 / (t * t) +
           (5.0 * sqrt32 / 8.0) / (t * t * t);
}

Image anscombe_inverse_unbiased(const Image& img) {
    return map_pixels(img, &anscombe_inverse_unbiased);
}

Image vst_restore(const Image& noisy, const VstPipelineConfig& cfg) {
    if (!cfg.denoiser.denoise) {
        throw data_error("vst_restore: no denoiser configured");
    }
    const Image transformed = anscombe_forward(noisy);
    const Image denoised = cfg.denoiser(transformed, 1.0);
    return cfg.inverse == VstInverse::algebraic ? anscombe_inverse_algebraic(denoised)
                                                : anscombe_inverse_unbiased(denoised);
}

} // namespace p4ip
