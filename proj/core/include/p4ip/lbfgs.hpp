#pragma once

#include <functional>

#include "p4ip/image.hpp"

namespace p4ip {

/// Limited-memory BFGS with two-loop recursion, gamma-scaled initial
/// Hessian and Armijo backtracking line search.
struct LbfgsConfig {
    int memory = 8;
    int max_iters = 100;
    /// Relative gradient stop: ||g||_inf <= grad_tol * (1 + ||g(x0)||_inf).
    double grad_tol = 1e-6;
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    int max_line_search_steps = 40;
};

struct LbfgsResult {
    Image x;
    double value = 0.0;
    double grad_inf_norm = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

/// Minimizes value_fn from x0; grad_fn must be the gradient of value_fn.
/// Deterministic; the objective never increases across iterations.
/// Non-finite value or gradient at an accepted iterate raises solver_error.
LbfgsResult minimize(const std::function<double(const Image&)>& value_fn,
                     const std::function<Image(const Image&)>& grad_fn, Image x0,
                     const LbfgsConfig& cfg = {});

} // namespace p4ip
