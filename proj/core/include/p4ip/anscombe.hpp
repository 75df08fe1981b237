#pragma once

#include "p4ip/denoisers.hpp"
#include "p4ip/image.hpp"

namespace p4ip {

/// Variance-stabilizing transform 2*sqrt(y + 3/8): Poisson(mu) maps to
/// approximately unit-variance Gaussian for large mu.
double anscombe_forward(double y);
Image anscombe_forward(const Image& img);

/// Plain algebraic inversion (t/2)^2 - 3/8.
double anscombe_inverse_algebraic(double t);
Image anscombe_inverse_algebraic(const Image& img);

/// Closed-form approximation of the exact unbiased inverse,
/// (t/2)^2 - 1/8 + sqrt(3/2)/4 t^-1 - 11/8 t^-2 + 5 sqrt(3/2)/8 t^-3.
/// Inputs below the transform's minimum 2*sqrt(3/8) are clamped to it.
double anscombe_inverse_unbiased(double t);
Image anscombe_inverse_unbiased(const Image& img);

enum class VstInverse { algebraic, unbiased };

struct VstPipelineConfig {
    Denoiser denoiser;
    VstInverse inverse = VstInverse::unbiased;
};

/// Baseline restoration: forward transform, Gaussian denoising at sigma = 1
/// (the stabilized noise level), then the configured inverse.
Image vst_restore(const Image& noisy, const VstPipelineConfig& cfg);

} // namespace p4ip
