#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "p4ip/denoisers.hpp"
#include "p4ip/errors.hpp"
#include "p4ip/metrics.hpp"
#include "testutil.hpp"

using p4ip::Denoiser;
using p4ip::Image;

#ifndef DENOISER_TOOL_PATH
#define DENOISER_TOOL_PATH "./denoiser_tool"
#endif

namespace {

// Smooth field whose symmetric reflection is exact, so near-identity
// filtering is measurable without boundary artifacts.
Image mirror_smooth_image(int w, int h) {
    Image img(w, h);
    const double pi = 3.14159265358979323846;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            img.at(r, c) =
                0.5 + 0.25 * std::cos(pi * (c + 0.5) / w) * std::cos(pi * (r + 0.5) / h);
        }
    }
    return img;
}

Image step_image(int w, int h, double lo, double hi) {
    Image img(w, h, lo);
    for (int r = 0; r < h; ++r) {
        for (int c = w / 2; c < w; ++c) {
            img.at(r, c) = hi;
        }
    }
    return img;
}

double variance_of(const Image& img) {
    const double m = p4ip::mean_value(img);
    double acc = 0.0;
    for (double v : img.data) {
        acc += (v - m) * (v - m);
    }
    return acc / static_cast<double>(img.size() - 1);
}

p4ip::ExternalDenoiserSpec tool_spec(const std::string& mode, double timeout = 30.0) {
    p4ip::ExternalDenoiserSpec spec;
    spec.command = std::string(DENOISER_TOOL_PATH) + " " + mode + " {input} {sigma} {output}";
    spec.timeout_sec = timeout;
    return spec;
}

} // namespace

TEST_CASE("every built-in maps constants to constants") {
    const Image c(24, 24, 0.7312);
    for (const Denoiser& d :
         {p4ip::gaussian_filter_denoiser(), p4ip::nlm_denoiser(), p4ip::tikhonov_prox_denoiser()}) {
        const Image out = d(c, 0.4);
        double expected = c.data[0];
        if (d.name == "tikhonov") {
            expected = c.data[0] / (1.0 + 0.16);
        }
        for (double v : out.data) {
            CHECK(v == doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("built-ins are deterministic") {
    const Image z = testutil::random_image(20, 20, 0.0, 2.0, 55);
    for (const Denoiser& d :
         {p4ip::gaussian_filter_denoiser(), p4ip::nlm_denoiser(), p4ip::tikhonov_prox_denoiser()}) {
        CHECK(testutil::bit_equal(d(z, 0.3), d(z, 0.3)));
    }
}

TEST_CASE("gaussian filter: near identity for tiny sigma on smooth content") {
    const Image img = mirror_smooth_image(64, 64);
    const Image out = p4ip::gaussian_filter_denoiser()(img, 0.01);
    CHECK(testutil::max_abs_diff(out, img) < 1e-3);
}

TEST_CASE("gaussian filter: reduces white-noise variance") {
    oracle::NormalSampler normal(808);
    Image noise(48, 48, 0.0);
    for (double& v : noise.data) {
        v = normal();
    }
    const Image out = p4ip::gaussian_filter_denoiser()(noise, 1.0);
    CHECK(variance_of(out) < variance_of(noise));
}

TEST_CASE("nlm: sigma zero degenerates to the identity") {
    const Image z = testutil::random_image(16, 16, 0.0, 3.0, 77);
    CHECK(testutil::bit_equal(p4ip::nlm_denoiser()(z, 0.0), z));
}

TEST_CASE("nlm: gains at least 3 dB on a noisy step image") {
    const double range = 1.0;
    const Image clean = step_image(48, 48, 0.2, 0.2 + range);
    oracle::NormalSampler normal(4242);
    Image noisy = clean;
    for (double& v : noisy.data) {
        v += 0.1 * range * normal();
    }
    const Image out = p4ip::nlm_denoiser()(noisy, 0.1 * range);
    const double gain = p4ip::psnr(clean, out, 1.2) - p4ip::psnr(clean, noisy, 1.2);
    CHECK(gain >= 3.0);
}

TEST_CASE("nlm: small images fall back to the gaussian filter") {
    const Image z = testutil::random_image(8, 8, 0.0, 1.0, 13);
    const Image nlm_out = p4ip::nlm_denoiser()(z, 0.25);
    const Image gauss_out = p4ip::gaussian_filter_denoiser()(z, 0.25);
    CHECK(testutil::bit_equal(nlm_out, gauss_out));
}

TEST_CASE("nlm: parameter validation") {
    CHECK_THROWS_AS(p4ip::nlm_denoiser(4, 11), p4ip::data_error);
    CHECK_THROWS_AS(p4ip::nlm_denoiser(11, 5), p4ip::data_error);
}

TEST_CASE("tikhonov prox: closed form and stationarity residual") {
    const Denoiser d = p4ip::tikhonov_prox_denoiser();
    CHECK(d(Image(1, 1, 2.0), 1.0).data[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d(Image(1, 1, 2.0), 1e-9).data[0] == doctest::Approx(2.0).epsilon(1e-12));

    const Image z = testutil::random_image(9, 9, -4.0, 4.0, 3);
    for (double sigma : {0.2, 1.0, 3.7}) {
        const Image v = d(z, sigma);
        for (std::size_t i = 0; i < v.data.size(); ++i) {
            const double residual = (v.data[i] - z.data[i]) / (sigma * sigma) + v.data[i];
            CHECK(std::fabs(residual) < 1e-12);
        }
    }
}

TEST_CASE("denoiser contract enforcement") {
    Denoiser broken;
    broken.name = "broken";
    broken.denoise = [](const Image&, double) { return Image(1, 1, 0.0); };
    CHECK_THROWS_AS(broken(Image(4, 4, 1.0), 0.5), p4ip::solver_error);

    Denoiser nan_out;
    nan_out.name = "nan";
    nan_out.denoise = [](const Image& z, double) {
        Image out = z;
        out.data[0] = std::nan("");
        return out;
    };
    CHECK_THROWS_AS(nan_out(Image(4, 4, 1.0), 0.5), p4ip::solver_error);
}

TEST_CASE("external bridge: copy-through behaves as the identity") {
    const Denoiser ext = p4ip::external_denoiser(tool_spec("copy"));
    const Image z = testutil::random_image(10, 7, -1.0, 5.0, 91);
    CHECK(testutil::bit_equal(ext(z, 0.5), z));
}

TEST_CASE("external bridge: matches the in-process gaussian filter bit for bit") {
    const Denoiser ext = p4ip::external_denoiser(tool_spec("gauss"));
    const Image z = testutil::random_image(17, 13, 0.0, 3.0, 92);
    const double sigma = 0.8125; // exact in binary, survives the decimal round trip
    CHECK(testutil::bit_equal(ext(z, sigma), p4ip::gaussian_filter_denoiser()(z, sigma)));
}

TEST_CASE("external bridge: failure modes surface as solver errors") {
    const Image z(6, 6, 1.0);
    CHECK_THROWS_AS(p4ip::external_denoiser(tool_spec("baddims"))(z, 0.5), p4ip::solver_error);
    CHECK_THROWS_AS(p4ip::external_denoiser(tool_spec("fail"))(z, 0.5), p4ip::solver_error);
    CHECK_THROWS_AS(p4ip::external_denoiser(tool_spec("slow", 0.25))(z, 0.5), p4ip::solver_error);
}

TEST_CASE("external bridge: spec validation") {
    p4ip::ExternalDenoiserSpec missing;
    missing.command = "prog {input} {output}"; // no {sigma}
    CHECK_THROWS_AS(p4ip::external_denoiser(missing), p4ip::data_error);

    testutil::TempDir dir("spec");
    const std::string path = dir.file("d.spec");
    testutil::write_file(path, "command = prog {input} {sigma} {output}\ntimeout_sec = 12\n");
    const auto spec = p4ip::load_denoiser_spec(path);
    CHECK(spec.timeout_sec == 12.0);

    const std::string bad = dir.file("bad.spec");
    testutil::write_file(bad, "command = prog {input}\n");
    CHECK_THROWS_AS(p4ip::load_denoiser_spec(bad), p4ip::data_error);
}

TEST_CASE("denoiser_by_name resolves selectors") {
    CHECK(p4ip::denoiser_by_name("gauss").name == "gauss");
    CHECK(p4ip::denoiser_by_name("nlm").name == "nlm");
    CHECK(p4ip::denoiser_by_name("tikhonov").name == "tikhonov");
    CHECK_THROWS_AS(p4ip::denoiser_by_name("bm3d"), p4ip::data_error);
}
