#include "p4ip/sampling.hpp"

#include <cmath>
#include <random>

#include "p4ip/errors.hpp"

namespace p4ip {

Image scale_to_peak(const Image& img, double peak) {
    if (!(peak > 0.0)) {
        throw data_error("scale_to_peak: peak must be positive");
    }
    require_nonnegative(img, "scale_to_peak input");
    const double maxv = max_value(img);
    if (maxv <= 0.0) {
        throw data_error("scale_to_peak: all-zero image");
    }
    Image out = img;
    // (v / maxv) * peak: the maximum divides to exactly 1, so max(out) == peak.
    for (double& v : out.data) {
        v = (v / maxv) * peak;
    }
    return out;
}

namespace {

// 53-bit uniform in [0, 1); bit-stable across standard libraries, unlike
// std::generate_canonical.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Inversion by sequential search. Fine for small means; exp(-mu) stays
// well above the underflow threshold for mu < 10.
std::uint64_t poisson_small(double mu, std::mt19937_64& rng) {
    const double u = uniform01(rng);
    double p = std::exp(-mu);
    double cdf = p;
    std::uint64_t k = 0;
    // The cap guards against the accumulated cdf stalling one ulp below an
    // extreme draw; P(K > 1000) is far beyond double precision for mu < 10.
    while (u > cdf && k < 1000) {
        ++k;
        p *= mu / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

// Transformed rejection with squeeze (Hormann's PTRS), valid for mu >= 10.
std::uint64_t poisson_ptrs(double mu, std::mt19937_64& rng) {
    const double log_mu = std::log(mu);
    const double b = 0.931 + 2.53 * std::sqrt(mu);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        const double u = uniform01(rng) - 0.5;
        const double v = uniform01(rng);
        const double us = 0.5 - std::fabs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mu + 0.43);
        if (us >= 0.07 && v <= v_r) {
            return static_cast<std::uint64_t>(kf);
        }
        if (kf < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        const double k = kf;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * log_mu - mu - std::lgamma(k + 1.0)) {
            return static_cast<std::uint64_t>(kf);
        }
    }
}

} // namespace

Image poisson_sample(const Image& img, std::uint64_t seed) {
    require_nonnegative(img, "poisson_sample input");
    std::mt19937_64 rng(seed);
    Image out(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const double mu = img.data[i];
        std::uint64_t k = 0;
        if (mu > 0.0) {
            k = (mu < 10.0) ? poisson_small(mu, rng) : poisson_ptrs(mu, rng);
        }
        out.data[i] = static_cast<double>(k);
    }
    return out;
}

} // namespace p4ip
