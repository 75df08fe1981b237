#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "p4ip/errors.hpp"
#include "p4ip/lbfgs.hpp"
#include "testutil.hpp"

using p4ip::Image;
using p4ip::LbfgsConfig;

namespace {

// value/grad pair for 1/2 ||x - c||^2
auto quadratic_value(const Image& c) {
    return [c](const Image& x) {
        double acc = 0.0;
        for (std::size_t i = 0; i < x.data.size(); ++i) {
            const double d = x.data[i] - c.data[i];
            acc += d * d;
        }
        return 0.5 * acc;
    };
}
auto quadratic_grad(const Image& c) {
    return [c](const Image& x) {
        Image g = x;
        for (std::size_t i = 0; i < g.data.size(); ++i) {
            g.data[i] -= c.data[i];
        }
        return g;
    };
}

double rosenbrock(const Image& x) {
    const double a = x.data[0], b = x.data[1];
    return (1.0 - a) * (1.0 - a) + 100.0 * (b - a * a) * (b - a * a);
}
Image rosenbrock_grad(const Image& x) {
    const double a = x.data[0], b = x.data[1];
    Image g(2, 1);
    g.data[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
    g.data[1] = 200.0 * (b - a * a);
    return g;
}

} // namespace

TEST_CASE("quadratic objective converges in a handful of iterations") {
    const Image c = testutil::random_image(6, 5, -2.0, 2.0, 4);
    const Image x0 = testutil::random_image(6, 5, -10.0, 10.0, 5);
    const auto res = p4ip::minimize(quadratic_value(c), quadratic_grad(c), x0, {});
    CHECK(res.converged);
    CHECK(res.iterations <= 5);
    CHECK(testutil::max_abs_diff(res.x, c) < 1e-8);
    CHECK(res.value <= quadratic_value(c)(x0));
}

TEST_CASE("scaled quadratic: gamma initialization makes the second step exact") {
    // For 1/2 alpha ||x - c||^2 the curvature pair gives gamma = 1/alpha,
    // so the second iteration reaches the minimizer regardless of alpha.
    const double alpha = 25.0;
    const Image c(4, 4, 1.5);
    const auto value = [&](const Image& x) {
        double acc = 0.0;
        for (std::size_t i = 0; i < x.data.size(); ++i) {
            const double d = x.data[i] - c.data[i];
            acc += d * d;
        }
        return 0.5 * alpha * acc;
    };
    const auto grad = [&](const Image& x) {
        Image g = x;
        for (std::size_t i = 0; i < g.data.size(); ++i) {
            g.data[i] = alpha * (g.data[i] - c.data[i]);
        }
        return g;
    };
    const auto res = p4ip::minimize(value, grad, Image(4, 4, -3.0), {});
    CHECK(res.converged);
    CHECK(res.iterations <= 3);
    CHECK(testutil::max_abs_diff(res.x, c) < 1e-8);
}

TEST_CASE("rosenbrock reaches (1,1)") {
    Image x0(2, 1);
    x0.data = {-1.2, 1.0};
    LbfgsConfig cfg;
    cfg.max_iters = 300;
    cfg.grad_tol = 1e-10;
    const auto res = p4ip::minimize(rosenbrock, rosenbrock_grad, x0, cfg);
    CHECK(std::fabs(res.x.data[0] - 1.0) < 1e-5);
    CHECK(std::fabs(res.x.data[1] - 1.0) < 1e-5);
}

TEST_CASE("already-optimal start returns immediately") {
    const Image c(3, 3, 0.5);
    const auto res = p4ip::minimize(quadratic_value(c), quadratic_grad(c), c, {});
    CHECK(res.converged);
    CHECK(res.iterations == 0);
    CHECK(testutil::bit_equal(res.x, c));
}

TEST_CASE("deterministic iterate sequence") {
    Image x0(2, 1);
    x0.data = {-1.2, 1.0};
    const auto a = p4ip::minimize(rosenbrock, rosenbrock_grad, x0, {});
    const auto b = p4ip::minimize(rosenbrock, rosenbrock_grad, x0, {});
    CHECK(testutil::bit_equal(a.x, b.x));
    CHECK(a.iterations == b.iterations);
    CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("non-finite objective at the start raises solver_error") {
    const auto bad_value = [](const Image&) { return std::nan(""); };
    const auto bad_grad = [](const Image& x) { return x; };
    CHECK_THROWS_AS(p4ip::minimize(bad_value, bad_grad, Image(2, 2, 1.0), {}),
                    p4ip::solver_error);
}

TEST_CASE("config validation") {
    const Image c(2, 2, 0.0);
    LbfgsConfig cfg;
    cfg.memory = 0;
    CHECK_THROWS_AS(p4ip::minimize(quadratic_value(c), quadratic_grad(c), c, cfg),
                    p4ip::data_error);
}
