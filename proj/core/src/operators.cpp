#include "p4ip/operators.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <mutex>

#include "p4ip/errors.hpp"
#include "p4ip/raster_io.hpp"

namespace p4ip {

namespace {

double normalize_weights(std::vector<double>& w) {
    double sum = 0.0;
    for (double v : w) {
        if (!(v >= 0.0)) {
            throw data_error("kernel weights must be nonnegative and finite");
        }
        sum += v;
    }
    if (sum <= 0.0) {
        throw data_error("kernel weights sum to zero");
    }
    for (double& v : w) {
        v /= sum;
    }
    return sum;
}

} // namespace

Kernel::Kernel(int side_, std::vector<double> weights_) : side(side_), weights(std::move(weights_)) {
    if (side < 1 || side % 2 == 0) {
        throw data_error("kernel side must be odd and positive, got " + std::to_string(side));
    }
    if (weights.size() != static_cast<std::size_t>(side) * side) {
        throw data_error("kernel weight count does not match side^2");
    }
    normalize_weights(weights);
}

Kernel make_gaussian_kernel(int size, double sigma) {
    if (size % 2 == 0) {
        throw data_error("make_gaussian_kernel: size must be odd");
    }
    if (!(sigma > 0.0)) {
        throw data_error("make_gaussian_kernel: sigma must be positive");
    }
    const int half = size / 2;
    std::vector<double> w(static_cast<std::size_t>(size) * size);
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            const double x1 = r - half, x2 = c - half;
            w[static_cast<std::size_t>(r) * size + c] =
                std::exp(-(x1 * x1 + x2 * x2) / (2.0 * sigma * sigma));
        }
    }
    return Kernel(size, std::move(w));
}

Kernel make_cauchy_kernel() {
    const int size = 15, half = 7;
    std::vector<double> w(static_cast<std::size_t>(size) * size);
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            const double x1 = r - half, x2 = c - half;
            w[static_cast<std::size_t>(r) * size + c] = 1.0 / (1.0 + x1 * x1 + x2 * x2);
        }
    }
    return Kernel(size, std::move(w));
}

Kernel make_uniform_kernel(int size) {
    if (size % 2 == 0) {
        throw data_error("make_uniform_kernel: size must be odd");
    }
    return Kernel(size, std::vector<double>(static_cast<std::size_t>(size) * size, 1.0));
}

Kernel kernel_from_raster(const std::string& path) {
    const Image img = load_raster(path);
    if (img.width != img.height) {
        throw data_error("kernel_from_raster: '" + path + "' is not square");
    }
    return Kernel(img.width, img.data);
}

Kernel kernel_by_name(const std::string& name) {
    if (name == "gaussian25") return make_gaussian_kernel();
    if (name == "cauchy15") return make_cauchy_kernel();
    if (name == "uniform9") return make_uniform_kernel();
    return kernel_from_raster(name);
}

namespace {

// FFTW plan creation/destruction is not thread-safe; executes on distinct
// arrays are.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    double* real = nullptr;
    fftw_complex* cplx = nullptr;
    FftwBuffer(std::size_t n_real, std::size_t n_cplx) {
        real = static_cast<double*>(fftw_malloc(sizeof(double) * n_real));
        cplx = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_cplx));
    }
    ~FftwBuffer() {
        fftw_free(real);
        fftw_free(cplx);
    }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

constexpr int kDirectKernelLimit = 15; // wider stencils go through the FFT

inline int wrap(int i, int n) {
    i %= n;
    return i < 0 ? i + n : i;
}

} // namespace

struct LinearOperator::Impl {
    bool ident = false;
    int w = 0, h = 0;
    Kernel kern;
    bool use_fft = false;

    // FFT path state: spectrum of the kernel wrapped onto the periodic grid,
    // plus plans created on prototype buffers (new-array execution keeps the
    // public surface reentrant).
    std::size_t n_cplx = 0;
    std::vector<std::complex<double>> spectrum;
    fftw_plan plan_fwd = nullptr;
    fftw_plan plan_bwd = nullptr;
    std::unique_ptr<FftwBuffer> proto;

    ~Impl() {
        if (plan_fwd || plan_bwd) {
            std::lock_guard<std::mutex> lock(fftw_mutex());
            if (plan_fwd) fftw_destroy_plan(plan_fwd);
            if (plan_bwd) fftw_destroy_plan(plan_bwd);
        }
    }
};

LinearOperator::LinearOperator(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

LinearOperator LinearOperator::identity(int width, int height) {
    if (width <= 0 || height <= 0) {
        throw data_error("LinearOperator: dimensions must be positive");
    }
    auto impl = std::make_shared<Impl>();
    impl->ident = true;
    impl->w = width;
    impl->h = height;
    return LinearOperator(std::move(impl));
}

LinearOperator LinearOperator::convolution(Kernel kernel, int width, int height) {
    if (width <= 0 || height <= 0) {
        throw data_error("LinearOperator: dimensions must be positive");
    }
    auto impl = std::make_shared<Impl>();
    impl->w = width;
    impl->h = height;
    impl->kern = std::move(kernel);
    impl->use_fft = impl->kern.side > kDirectKernelLimit;
    if (impl->use_fft) {
        const std::size_t n_real = static_cast<std::size_t>(width) * height;
        impl->n_cplx = static_cast<std::size_t>(height) * (width / 2 + 1);

        // Wrap kernel taps onto the grid; taps alias additively when the
        // kernel is wider than the image, matching the direct modulo path.
        std::vector<double> wrapped(n_real, 0.0);
        const int half = impl->kern.side / 2;
        for (int r = 0; r < impl->kern.side; ++r) {
            for (int c = 0; c < impl->kern.side; ++c) {
                const int ky = wrap(r - half, height);
                const int kx = wrap(c - half, width);
                wrapped[static_cast<std::size_t>(ky) * width + kx] += impl->kern.at(r, c);
            }
        }

        impl->proto = std::make_unique<FftwBuffer>(n_real, impl->n_cplx);
        {
            std::lock_guard<std::mutex> lock(fftw_mutex());
            impl->plan_fwd = fftw_plan_dft_r2c_2d(height, width, impl->proto->real,
                                                  impl->proto->cplx, FFTW_ESTIMATE);
            impl->plan_bwd = fftw_plan_dft_c2r_2d(height, width, impl->proto->cplx,
                                                  impl->proto->real, FFTW_ESTIMATE);
        }
        std::memcpy(impl->proto->real, wrapped.data(), sizeof(double) * n_real);
        fftw_execute(impl->plan_fwd);
        impl->spectrum.resize(impl->n_cplx);
        for (std::size_t i = 0; i < impl->n_cplx; ++i) {
            impl->spectrum[i] = {impl->proto->cplx[i][0], impl->proto->cplx[i][1]};
        }
    }
    return LinearOperator(std::move(impl));
}

bool LinearOperator::is_identity() const { return impl_->ident; }
int LinearOperator::width() const { return impl_->w; }
int LinearOperator::height() const { return impl_->h; }
const Kernel* LinearOperator::kernel() const { return impl_->ident ? nullptr : &impl_->kern; }

namespace {

// sign=-1: convolution out(p) = sum_k K(k) img(p-k); sign=+1: correlation.
Image convolve_direct(const Image& img, const Kernel& k, int sign) {
    Image out(img.width, img.height);
    const int half = k.side / 2;
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            double acc = 0.0;
            for (int i = 0; i < k.side; ++i) {
                const int rr = wrap(r + sign * (i - half), img.height);
                for (int j = 0; j < k.side; ++j) {
                    const int cc = wrap(c + sign * (j - half), img.width);
                    acc += k.at(i, j) * img.at(rr, cc);
                }
            }
            out.at(r, c) = acc;
        }
    }
    return out;
}

} // namespace

Image LinearOperator::apply(const Image& img) const {
    if (img.width != impl_->w || img.height != impl_->h) {
        throw data_error("LinearOperator::apply: dimension mismatch");
    }
    if (impl_->ident) {
        return img;
    }
    if (!impl_->use_fft) {
        return convolve_direct(img, impl_->kern, -1);
    }
    return fft_filter(img, /*conjugate=*/false);
}

Image LinearOperator::adjoint(const Image& img) const {
    if (img.width != impl_->w || img.height != impl_->h) {
        throw data_error("LinearOperator::adjoint: dimension mismatch");
    }
    if (impl_->ident) {
        return img;
    }
    if (!impl_->use_fft) {
        return convolve_direct(img, impl_->kern, +1);
    }
    return fft_filter(img, /*conjugate=*/true);
}

Image LinearOperator::fft_filter(const Image& img, bool conjugate) const {
    const Impl& im = *impl_;
    const std::size_t n_real = static_cast<std::size_t>(im.w) * im.h;
    FftwBuffer buf(n_real, im.n_cplx);
    std::memcpy(buf.real, img.data.data(), sizeof(double) * n_real);
    fftw_execute_dft_r2c(im.plan_fwd, buf.real, buf.cplx);
    for (std::size_t i = 0; i < im.n_cplx; ++i) {
        const std::complex<double> s =
            conjugate ? std::conj(im.spectrum[i]) : im.spectrum[i];
        const std::complex<double> z(buf.cplx[i][0], buf.cplx[i][1]);
        const std::complex<double> p = z * s;
        buf.cplx[i][0] = p.real();
        buf.cplx[i][1] = p.imag();
    }
    fftw_execute_dft_c2r(im.plan_bwd, buf.cplx, buf.real);
    Image out(im.w, im.h);
    const double scale = 1.0 / static_cast<double>(n_real);
    for (std::size_t i = 0; i < n_real; ++i) {
        out.data[i] = buf.real[i] * scale;
    }
    return out;
}

} // namespace p4ip
