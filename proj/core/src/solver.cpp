#include "p4ip/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "p4ip/binning.hpp"
#include "p4ip/errors.hpp"
#include "p4ip/likelihood.hpp"

namespace p4ip {

SolverParams denoise_params_for_peak(double peak, int iters) {
    if (!(peak > 0.0)) {
        throw data_error("denoise_params_for_peak: peak must be positive");
    }
    SolverParams p;
    p.lambda0 = 0.5 / peak;
    p.lambda_step = 1.05;
    p.beta = 1.0;
    p.iters = iters;
    p.peak = peak;
    return p;
}

SolverParams deblur_params_for_peak(double peak, int iters) {
    if (!(peak > 0.0)) {
        throw data_error("deblur_params_for_peak: peak must be positive");
    }
    SolverParams p;
    p.lambda0 = 0.2 / peak;
    p.lambda_step = 1.03;
    p.beta = 1.0;
    p.iters = iters;
    p.peak = peak;
    return p;
}

double anscombe_equiv_lambda() { return 0.25; }
double anscombe_equiv_offset() { return 4.0 * (std::sqrt(0.375) + 1.0); }

std::string RunReport::csv_header() { return "image,peak,kernel,method,psnr,iters,wall_ms"; }

std::string RunReport::csv_row(const std::string& image, double peak, const std::string& kernel,
                               double psnr_db) const {
    char psnr_field[32] = ""; // empty when no reference was available
    if (std::isinf(psnr_db)) {
        std::snprintf(psnr_field, sizeof(psnr_field), "inf");
    } else if (!std::isnan(psnr_db)) {
        std::snprintf(psnr_field, sizeof(psnr_field), "%.2f", psnr_db);
    }
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%g,%s,%s,%s,%d,%.0f", image.c_str(), peak, kernel.c_str(),
                  method.c_str(), psnr_field, iters, wall_ms);
    return buf;
}

std::string RunReport::format_log() const {
    std::ostringstream os;
    os << "method=" << method << " denoiser=" << denoiser << " iters=" << iters
       << " lambda0=" << lambda0 << " lambda_step=" << lambda_step << " beta=" << beta
       << " output=" << (output == OutputKind::denoised ? "v" : "x") << " wall_ms=" << wall_ms
       << "\n";
    for (std::size_t k = 0; k < trace.size(); ++k) {
        os << "  k=" << k << " lambda=" << trace[k].lambda << " sigma=" << trace[k].sigma
           << " |x-v|=" << trace[k].primal_residual << "\n";
    }
    return os.str();
}

double x_update_scalar(double y, double c_sum, double lambda, int n_priors) {
    const double b = lambda * c_sum - 1.0;
    const double fn = 4.0 * static_cast<double>(n_priors);
    const double dn = 2.0 * static_cast<double>(n_priors);
    return (b + std::sqrt(b * b + fn * lambda * y)) / (dn * lambda);
}

Image x_update_denoise(const Image& y, const Image& v, const Image& u, double lambda) {
    if (!(lambda > 0.0)) {
        throw data_error("x_update_denoise: lambda must be positive");
    }
    require_same_dims(y, v, "x_update_denoise");
    require_same_dims(y, u, "x_update_denoise");
    Image x(y.width, y.height);
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        x.data[i] = x_update_scalar(y.data[i], v.data[i] - u.data[i], lambda, 1);
    }
    return x;
}

Image x_update_general(const Image& y, const Image& v, const Image& u, double lambda,
                       const LinearOperator& H, const Image& x_warm, const LbfgsConfig& cfg,
                       double epsilon) {
    if (!(lambda > 0.0)) {
        throw data_error("x_update_general: lambda must be positive");
    }
    require_same_dims(y, v, "x_update_general");
    require_same_dims(y, u, "x_update_general");
    require_same_dims(y, x_warm, "x_update_general");
    const PoissonNll nll(y, H, epsilon);

    // Coupling target v - u is fixed during the inner solve.
    Image target(y.width, y.height);
    for (std::size_t i = 0; i < target.data.size(); ++i) {
        target.data[i] = v.data[i] - u.data[i];
    }

    const auto value = [&](const Image& x) {
        double quad = 0.0;
        for (std::size_t i = 0; i < x.data.size(); ++i) {
            const double d = x.data[i] - target.data[i];
            quad += d * d;
        }
        return nll.value(x) + 0.5 * lambda * quad;
    };
    const auto grad = [&](const Image& x) {
        Image g = nll.grad(x);
        for (std::size_t i = 0; i < g.data.size(); ++i) {
            g.data[i] += lambda * (x.data[i] - target.data[i]);
        }
        return g;
    };

    // Intensities are nonnegative; projecting the unconstrained solution
    // recovers the constrained minimizer exactly on separable (identity)
    // problems, matching the closed-form root. Zero-count pixels are the
    // ones that can dip below zero.
    Image x = minimize(value, grad, x_warm, cfg).x;
    for (double& xv : x.data) {
        xv = std::max(xv, 0.0);
    }
    if (value(x) > value(x_warm)) {
        return x_warm;
    }
    return x;
}

namespace {

Image initial_v(const Image& y, InitKind init) {
    switch (init) {
    case InitKind::anscombe_match:
        return Image(y.width, y.height, anscombe_equiv_offset());
    case InitKind::zero:
    default:
        return Image(y.width, y.height, 0.0);
    }
}

void validate_run_inputs(const Image& y, const LinearOperator& H, const SolverParams& params) {
    require_nonnegative(y, "solver counts y");
    if (y.width != H.width() || y.height != H.height()) {
        throw data_error("solver: counts do not match operator domain");
    }
    if (!(params.lambda0 > 0.0) || !(params.lambda_step >= 1.0)) {
        throw data_error("solver: lambda0 > 0 and lambda_step >= 1 required");
    }
    if (!(params.beta > 0.0) || params.iters < 1) {
        throw data_error("solver: beta > 0 and iters >= 1 required");
    }
}

double l2_diff(const Image& a, const Image& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

// Minimizes l(x) + lambda/2 sum_j ||x - v_j + u_j||^2 for a general H.
Image x_update_multi_general(const Image& y, const std::vector<Image>& v,
                             const std::vector<Image>& u, double lambda, const LinearOperator& H,
                             const Image& x_warm, const LbfgsConfig& cfg) {
    const PoissonNll nll(y, H);
    const std::size_t n = v.size();

    const auto value = [&](const Image& x) {
        double quad = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < x.data.size(); ++i) {
                const double d = x.data[i] - v[j].data[i] + u[j].data[i];
                quad += d * d;
            }
        }
        return nll.value(x) + 0.5 * lambda * quad;
    };
    const auto grad = [&](const Image& x) {
        Image g = nll.grad(x);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < g.data.size(); ++i) {
                g.data[i] += lambda * (x.data[i] - v[j].data[i] + u[j].data[i]);
            }
        }
        return g;
    };
    Image x = minimize(value, grad, x_warm, cfg).x;
    for (double& xv : x.data) {
        xv = std::max(xv, 0.0);
    }
    if (value(x) > value(x_warm)) {
        return x_warm;
    }
    return x;
}

} // namespace

RunResult p4ip_run(const Image& y, const LinearOperator& H, const Denoiser& denoiser,
                   const SolverParams& params, const IterateObserver& observer) {
    validate_run_inputs(y, H, params);
    const auto t0 = std::chrono::steady_clock::now();

    Image x = y; // warm start for the general path; overwritten either way
    Image v = initial_v(y, params.init);
    Image u(y.width, y.height, 0.0);

    RunReport report;
    report.method = "p4ip";
    report.denoiser = denoiser.name;
    report.iters = params.iters;
    report.lambda0 = params.lambda0;
    report.lambda_step = params.lambda_step;
    report.beta = params.beta;
    report.output = params.output;
    report.trace.reserve(params.iters);

    double lambda = params.lambda0;
    for (int k = 0; k < params.iters; ++k) {
        if (H.is_identity()) {
            x = x_update_denoise(y, v, u, lambda);
        } else {
            x = x_update_general(y, v, u, lambda, H, x, params.inner);
        }

        const double sigma = std::sqrt(params.beta / lambda);
        Image noisy_estimate = x;
        for (std::size_t i = 0; i < noisy_estimate.data.size(); ++i) {
            noisy_estimate.data[i] += u.data[i];
        }
        v = denoiser(noisy_estimate, sigma);

        for (std::size_t i = 0; i < u.data.size(); ++i) {
            u.data[i] += x.data[i] - v.data[i];
        }

        report.trace.push_back({lambda, sigma, l2_diff(x, v)});
        if (observer) {
            observer(k, x, v, u);
        }
        lambda *= params.lambda_step;
    }

    report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                         .count();
    RunResult result;
    result.image = (params.output == OutputKind::denoised) ? std::move(v) : std::move(x);
    result.report = std::move(report);
    return result;
}

RunResult p4ip_multi_run(const Image& y, const LinearOperator& H,
                         const std::vector<PriorSpec>& priors, const SolverParams& params,
                         const MultiIterateObserver& observer) {
    validate_run_inputs(y, H, params);
    if (priors.empty()) {
        throw data_error("p4ip_multi_run: at least one prior required");
    }
    const int n = static_cast<int>(priors.size());
    const auto t0 = std::chrono::steady_clock::now();

    Image x = y;
    std::vector<Image> v(priors.size(), initial_v(y, params.init));
    std::vector<Image> u(priors.size(), Image(y.width, y.height, 0.0));

    RunReport report;
    report.method = "m-p4ip";
    report.denoiser = priors[0].denoiser.name;
    for (std::size_t j = 1; j < priors.size(); ++j) {
        report.denoiser += "+" + priors[j].denoiser.name;
    }
    report.iters = params.iters;
    report.lambda0 = params.lambda0;
    report.lambda_step = params.lambda_step;
    report.beta = priors[0].beta;
    report.output = params.output;
    report.trace.reserve(params.iters);

    double lambda = params.lambda0;
    for (int k = 0; k < params.iters; ++k) {
        if (H.is_identity()) {
            for (std::size_t i = 0; i < x.data.size(); ++i) {
                double c_sum = 0.0;
                for (std::size_t j = 0; j < priors.size(); ++j) {
                    c_sum += v[j].data[i] - u[j].data[i];
                }
                x.data[i] = x_update_scalar(y.data[i], c_sum, lambda, n);
            }
        } else {
            // Minimize l(x) + lambda/2 sum_j ||x - v_j + u_j||^2: the
            // coupling acts like a single quadratic with n-fold weight
            // centered on the mean of v_j - u_j.
            x = x_update_multi_general(y, v, u, lambda, H, x, params.inner);
        }

        double residual_acc = 0.0;
        for (std::size_t j = 0; j < priors.size(); ++j) {
            const double sigma = std::sqrt(priors[j].beta / lambda);
            Image noisy_estimate = x;
            for (std::size_t i = 0; i < noisy_estimate.data.size(); ++i) {
                noisy_estimate.data[i] += u[j].data[i];
            }
            v[j] = priors[j].denoiser(noisy_estimate, sigma);
            for (std::size_t i = 0; i < u[j].data.size(); ++i) {
                u[j].data[i] += x.data[i] - v[j].data[i];
            }
            residual_acc += l2_diff(x, v[j]);
        }

        const double sigma0 = std::sqrt(priors[0].beta / lambda);
        report.trace.push_back({lambda, sigma0, residual_acc / n});
        if (observer) {
            observer(k, x, v, u);
        }
        lambda *= params.lambda_step;
    }

    // Aggregate the prior-consistent iterates; with one prior this returns
    // v[0] bit-exactly.
    Image out_v = v[0];
    for (std::size_t j = 1; j < v.size(); ++j) {
        for (std::size_t i = 0; i < out_v.data.size(); ++i) {
            out_v.data[i] += v[j].data[i];
        }
    }
    for (double& val : out_v.data) {
        val /= static_cast<double>(n);
    }

    report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                         .count();
    RunResult result;
    result.image = (params.output == OutputKind::denoised) ? std::move(out_v) : std::move(x);
    result.report = std::move(report);
    return result;
}

std::vector<double> transform_curve(double lambda, double v_minus_u,
                                    const std::vector<double>& y_grid) {
    if (!(lambda > 0.0)) {
        throw data_error("transform_curve: lambda must be positive");
    }
    std::vector<double> out(y_grid.size());
    for (std::size_t i = 0; i < y_grid.size(); ++i) {
        out[i] = x_update_scalar(y_grid[i], v_minus_u, lambda, 1);
    }
    return out;
}

RunResult restore_with_binning(const Image& y, const Denoiser& denoiser,
                               const SolverParams& params) {
    const int f = params.binning_factor;
    if (f < 1) {
        throw data_error("restore_with_binning: binning_factor must be >= 1");
    }
    if (f == 1) {
        return p4ip_run(y, LinearOperator::identity(y.width, y.height), denoiser, params);
    }
    const Image small = bin_down(y, f);

    // Summed counts are factor^2 brighter; rescale the preset-bearing
    // fields accordingly (lambda0 scales like 1/peak).
    SolverParams inner = params;
    inner.peak = params.peak * f * f;
    inner.lambda0 = params.lambda0 / (static_cast<double>(f) * f);
    inner.binning_factor = 1;

    RunResult run =
        p4ip_run(small, LinearOperator::identity(small.width, small.height), denoiser, inner);
    run.image = bin_up(run.image, f, y.width, y.height);
    run.report.method = "p4ip-bin";
    return run;
}

} // namespace p4ip
