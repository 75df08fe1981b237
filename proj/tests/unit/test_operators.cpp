#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "p4ip/errors.hpp"
#include "p4ip/operators.hpp"
#include "p4ip/raster_io.hpp"
#include "testutil.hpp"

using p4ip::Image;
using p4ip::Kernel;
using p4ip::LinearOperator;

namespace {

double kernel_sum(const Kernel& k) {
    return std::accumulate(k.weights.begin(), k.weights.end(), 0.0);
}

double inner(const Image& a, const Image& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        acc += a.data[i] * b.data[i];
    }
    return acc;
}

Image circular_shift(const Image& img, int dy, int dx) {
    Image out(img.width, img.height);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            out.at((r + dy) % img.height, (c + dx) % img.width) = img.at(r, c);
        }
    }
    return out;
}

// Reference circular convolution, written independently of the library path.
Image naive_circular_conv(const Image& img, const Kernel& k) {
    Image out(img.width, img.height);
    const int half = k.side / 2;
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            double acc = 0.0;
            for (int i = 0; i < k.side; ++i) {
                for (int j = 0; j < k.side; ++j) {
                    int rr = (r - (i - half)) % img.height;
                    int cc = (c - (j - half)) % img.width;
                    if (rr < 0) rr += img.height;
                    if (cc < 0) cc += img.width;
                    acc += k.at(i, j) * img.at(rr, cc);
                }
            }
            out.at(r, c) = acc;
        }
    }
    return out;
}

} // namespace

TEST_CASE("gaussian kernel: unimodal, symmetric, normalized") {
    const Kernel k = p4ip::make_gaussian_kernel();
    CHECK(k.side == 25);
    const double center = k.at(12, 12);
    for (double w : k.weights) {
        CHECK(w <= center);
    }
    for (int r = 0; r < k.side; ++r) {
        for (int c = 0; c < k.side; ++c) {
            CHECK(k.at(r, c) == doctest::Approx(k.at(c, r)).epsilon(1e-14));             // transpose
            CHECK(k.at(r, c) == doctest::Approx(k.at(k.side - 1 - r, c)).epsilon(1e-14)); // flip
        }
    }
    CHECK(std::fabs(kernel_sum(k) - 1.0) < 1e-12);
    CHECK_THROWS_AS(p4ip::make_gaussian_kernel(24, 1.6), p4ip::data_error);
}

TEST_CASE("cauchy kernel: 15x15 with center/corner ratio 99") {
    const Kernel k = p4ip::make_cauchy_kernel();
    CHECK(k.side == 15);
    CHECK(k.at(7, 7) / k.at(0, 0) == doctest::Approx(99.0).epsilon(1e-13));
    for (int r = 0; r < k.side; ++r) {
        for (int c = 0; c < k.side; ++c) {
            CHECK(k.at(r, c) == doctest::Approx(k.at(k.side - 1 - r, k.side - 1 - c)).epsilon(1e-14));
            CHECK(k.at(r, c) == doctest::Approx(k.at(c, r)).epsilon(1e-14));
        }
    }
    CHECK(std::fabs(kernel_sum(k) - 1.0) < 1e-12);
}

TEST_CASE("uniform kernel: flat weights, DC preservation, impulse response") {
    const Kernel k = p4ip::make_uniform_kernel();
    CHECK(k.side == 9);
    for (double w : k.weights) {
        CHECK(w == doctest::Approx(1.0 / 81.0).epsilon(1e-15));
    }
    CHECK_THROWS_AS(p4ip::make_uniform_kernel(8), p4ip::data_error);

    const auto H = LinearOperator::convolution(k, 11, 11);
    const Image constant(11, 11, 3.25);
    const Image blurred = H.apply(constant);
    for (double v : blurred.data) {
        CHECK(v == doctest::Approx(3.25).epsilon(1e-14));
    }

    Image delta(11, 11, 0.0);
    delta.at(5, 5) = 1.0;
    const Image resp = H.apply(delta);
    for (int r = 0; r < 11; ++r) {
        for (int c = 0; c < 11; ++c) {
            const bool in_support = std::abs(r - 5) <= 4 && std::abs(c - 5) <= 4;
            CHECK(resp.at(r, c) == doctest::Approx(in_support ? 1.0 / 81.0 : 0.0).epsilon(1e-13));
        }
    }
}

TEST_CASE("identity operator: apply and adjoint are the image itself") {
    const auto H = LinearOperator::identity(6, 4);
    CHECK(H.is_identity());
    CHECK(H.kernel() == nullptr);
    const Image img = testutil::random_image(6, 4, -1.0, 2.0, 5);
    CHECK(testutil::bit_equal(H.apply(img), img));
    CHECK(testutil::bit_equal(H.adjoint(img), img));
}

TEST_CASE("convolution commutes with circular shifts") {
    const Image img = testutil::random_image(16, 16, 0.0, 3.0, 8);
    for (const char* name : {"cauchy15", "uniform9", "gaussian25"}) {
        const auto H = LinearOperator::convolution(p4ip::kernel_by_name(name), 16, 16);
        const Image a = H.apply(circular_shift(img, 3, 5));
        const Image b = circular_shift(H.apply(img), 3, 5);
        CHECK(testutil::max_abs_diff(a, b) < 1e-12);
    }
}

TEST_CASE("adjoint equals apply for symmetric kernels") {
    const Image img = testutil::random_image(20, 14, 0.0, 5.0, 13);
    for (const char* name : {"gaussian25", "cauchy15", "uniform9"}) {
        const auto H = LinearOperator::convolution(p4ip::kernel_by_name(name), 20, 14);
        CHECK(testutil::max_abs_diff(H.apply(img), H.adjoint(img)) < 1e-12);
    }
}

TEST_CASE("normalized kernels preserve total intensity on the periodic grid") {
    const Image img = testutil::random_image(20, 14, 0.0, 5.0, 14);
    const double total = p4ip::sum_value(img);
    for (const char* name : {"gaussian25", "cauchy15", "uniform9"}) {
        const auto H = LinearOperator::convolution(p4ip::kernel_by_name(name), 20, 14);
        CHECK(p4ip::sum_value(H.apply(img)) == doctest::Approx(total).epsilon(1e-10));
    }
}

TEST_CASE("adjoint identity <Ha,b> = <a,H^T b> on random pairs") {
    for (const char* name : {"gaussian25", "cauchy15", "uniform9"}) {
        const auto H = LinearOperator::convolution(p4ip::kernel_by_name(name), 16, 16);
        for (int trial = 0; trial < 5; ++trial) {
            const Image a = testutil::random_image(16, 16, -2.0, 2.0, 100 + trial);
            const Image b = testutil::random_image(16, 16, -2.0, 2.0, 200 + trial);
            const double lhs = inner(H.apply(a), b);
            const double rhs = inner(a, H.adjoint(b));
            CHECK(std::fabs(lhs - rhs) <= 1e-10 * std::max(1.0, std::fabs(lhs)));
        }
    }
}

TEST_CASE("fft path agrees with naive circular convolution") {
    const Image img = testutil::random_image(20, 20, 0.0, 4.0, 17);
    const Kernel g25 = p4ip::make_gaussian_kernel();
    const auto H = LinearOperator::convolution(g25, 20, 20); // side 25 > 15: fft path
    const Image fast = H.apply(img);
    const Image ref = naive_circular_conv(img, g25);
    CHECK(testutil::max_abs_diff(fast, ref) < 1e-10);
}

TEST_CASE("kernel wider than the grid wraps consistently in both paths") {
    const Image img = testutil::random_image(8, 8, 0.0, 4.0, 19);
    const Kernel g25 = p4ip::make_gaussian_kernel();
    const auto H = LinearOperator::convolution(g25, 8, 8);
    CHECK(testutil::max_abs_diff(H.apply(img), naive_circular_conv(img, g25)) < 1e-10);
    // total intensity preserved by normalized kernels on the periodic grid
    CHECK(p4ip::sum_value(H.apply(img)) ==
          doctest::Approx(p4ip::sum_value(img)).epsilon(1e-10));
}

TEST_CASE("kernel constructors are deterministic") {
    const Kernel a = p4ip::make_gaussian_kernel();
    const Kernel b = p4ip::make_gaussian_kernel();
    CHECK(a.weights == b.weights);
}

TEST_CASE("custom kernels load from raster files") {
    testutil::TempDir dir("kern");
    Image k(3, 3);
    k.data = {0, 1, 0, 1, 4, 1, 0, 1, 0};
    const std::string path = dir.file("k.raster");
    p4ip::save_raster(k, path);
    const Kernel loaded = p4ip::kernel_by_name(path);
    CHECK(loaded.side == 3);
    CHECK(loaded.at(1, 1) == doctest::Approx(0.5).epsilon(1e-15));

    Image bad(4, 4, 1.0); // even side
    const std::string bad_path = dir.file("bad.raster");
    p4ip::save_raster(bad, bad_path);
    CHECK_THROWS_AS(p4ip::kernel_from_raster(bad_path), p4ip::data_error);
}

TEST_CASE("apply rejects mismatched dimensions") {
    const auto H = LinearOperator::convolution(p4ip::make_uniform_kernel(), 8, 8);
    CHECK_THROWS_AS(H.apply(Image(9, 8, 0.0)), p4ip::data_error);
    CHECK_THROWS_AS(H.adjoint(Image(8, 9, 0.0)), p4ip::data_error);
}
