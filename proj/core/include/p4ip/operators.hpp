#pragma once

#include <memory>
#include <string>
#include <vector>

#include "p4ip/image.hpp"

namespace p4ip {

/// Odd-sided nonnegative convolution stencil, normalized to unit sum.
struct Kernel {
    int side = 0;
    std::vector<double> weights;

    Kernel() = default;
    /// Validates (odd side, nonnegative) and normalizes to sum 1.
    Kernel(int side, std::vector<double> weights);

    double at(int r, int c) const { return weights[static_cast<std::size_t>(r) * side + c]; }
};

/// Gaussian stencil exp(-(x1^2+x2^2)/(2 sigma^2)) on the centered grid.
Kernel make_gaussian_kernel(int size = 25, double sigma = 1.6);
/// 1/(1 + x1^2 + x2^2) on the 15x15 grid x1,x2 = -7..7.
Kernel make_cauchy_kernel();
/// Flat stencil, every weight 1/size^2.
Kernel make_uniform_kernel(int size = 9);
/// Loads an odd-sided kernel from a raster interchange file.
Kernel kernel_from_raster(const std::string& path);
/// Resolves "gaussian25" | "cauchy15" | "uniform9", or a raster file path.
Kernel kernel_by_name(const std::string& name);

/// The degradation H: identity or circular (periodic-boundary) convolution
/// with a fixed kernel on a fixed grid. Immutable after construction;
/// apply/adjoint are pure and safe to call concurrently.
///
/// adjoint() is the exact transpose, i.e. correlation with the kernel, so
/// <H a, b> == <a, H^T b> up to roundoff. Kernels wider than 15 run through
/// an FFT (the taps wrap onto the periodic grid either way).
class LinearOperator {
public:
    static LinearOperator identity(int width, int height);
    static LinearOperator convolution(Kernel kernel, int width, int height);

    bool is_identity() const;
    int width() const;
    int height() const;
    /// Kernel of a convolution operator; nullptr for the identity.
    const Kernel* kernel() const;

    Image apply(const Image& img) const;
    Image adjoint(const Image& img) const;

private:
    struct Impl;
    explicit LinearOperator(std::shared_ptr<const Impl> impl);
    Image fft_filter(const Image& img, bool conjugate) const;
    std::shared_ptr<const Impl> impl_;
};

} // namespace p4ip
