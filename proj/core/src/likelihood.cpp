#include "p4ip/likelihood.hpp"

#include <cmath>

#include "p4ip/errors.hpp"

namespace p4ip {

double safe_log(double t, double epsilon) {
    if (t >= epsilon) {
        return std::log(t);
    }
    const double a = -1.0 / (2.0 * epsilon * epsilon);
    const double b = 2.0 / epsilon;
    const double c = std::log(epsilon) - 1.5;
    return (a * t + b) * t + c;
}

double safe_log_d1(double t, double epsilon) {
    if (t >= epsilon) {
        return 1.0 / t;
    }
    const double a = -1.0 / (2.0 * epsilon * epsilon);
    const double b = 2.0 / epsilon;
    return 2.0 * a * t + b;
}

double default_epsilon(const Image& y) { return 1e-8 * (mean_value(y) + 1.0); }

PoissonNll::PoissonNll(Image y, LinearOperator op, double epsilon)
    : y_(std::move(y)), op_(std::move(op)), epsilon_(epsilon) {
    require_nonnegative(y_, "PoissonNll counts");
    if (y_.width != op_.width() || y_.height != op_.height()) {
        throw data_error("PoissonNll: counts do not match operator domain");
    }
    if (epsilon_ <= 0.0) {
        epsilon_ = default_epsilon(y_);
    }
    adjoint_ones_ = op_.adjoint(Image(y_.width, y_.height, 1.0));
}

double PoissonNll::value(const Image& x) const {
    require_same_dims(y_, x, "PoissonNll::value");
    const Image hx = op_.apply(x);
    double acc = 0.0;
    for (std::size_t i = 0; i < hx.data.size(); ++i) {
        acc += -y_.data[i] * safe_log(hx.data[i], epsilon_) + hx.data[i];
    }
    return acc;
}

Image PoissonNll::grad(const Image& x) const {
    require_same_dims(y_, x, "PoissonNll::grad");
    const Image hx = op_.apply(x);
    Image weighted(x.width, x.height);
    for (std::size_t i = 0; i < hx.data.size(); ++i) {
        weighted.data[i] = y_.data[i] * safe_log_d1(hx.data[i], epsilon_);
    }
    const Image back = op_.adjoint(weighted);
    Image g(x.width, x.height);
    for (std::size_t i = 0; i < g.data.size(); ++i) {
        g.data[i] = -back.data[i] + adjoint_ones_.data[i];
    }
    return g;
}

} // namespace p4ip
