#include "p4ip/metrics.hpp"

#include <cmath>
#include <limits>

#include "p4ip/errors.hpp"

namespace p4ip {

double mse(const Image& reference, const Image& test) {
    require_same_dims(reference, test, "mse");
    double acc = 0.0;
    for (std::size_t i = 0; i < reference.data.size(); ++i) {
        const double d = reference.data[i] - test.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(reference.size());
}

double psnr(const Image& reference, const Image& test, double peak_max) {
    if (!(peak_max > 0.0)) {
        throw data_error("psnr: peak_max must be positive");
    }
    const double err = mse(reference, test);
    if (err == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(peak_max * peak_max / err);
}

} // namespace p4ip
