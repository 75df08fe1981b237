#pragma once

#include <functional>
#include <string>
#include <vector>

#include "p4ip/denoisers.hpp"
#include "p4ip/image.hpp"
#include "p4ip/lbfgs.hpp"
#include "p4ip/operators.hpp"

namespace p4ip {

enum class OutputKind {
    denoised, // final v, the prior-consistent iterate (default)
    primal    // final x
};

enum class InitKind {
    zero,          // u0 = 0, v0 = 0
    anscombe_match // v0 = 4(sqrt(3/8)+1), the stabilizing-transform preset
};

/// Splitting-solver parameters. The denoiser noise level at iteration k is
/// sigma_k = sqrt(beta / lambda_k) with lambda_k = lambda0 * lambda_step^k.
struct SolverParams {
    double lambda0 = 0.5;
    double lambda_step = 1.05; // >= 1; > 1 tightens the coupling each iteration
    double beta = 1.0;         // prior weight
    int iters = 60;            // fixed iteration count; the only stopping rule
    double peak = 1.0;         // degradation peak, used by parameter presets
    int binning_factor = 1;    // 1 = off; 3 = the standard binning setting
    OutputKind output = OutputKind::denoised;
    InitKind init = InitKind::zero;
    LbfgsConfig inner; // inner solve for non-identity H
};

/// Shipped defaults per scenario. Tuned on synthetic scenes; overridable.
SolverParams denoise_params_for_peak(double peak, int iters = 60);
SolverParams deblur_params_for_peak(double peak, int iters = 44);

/// lambda = 0.25 and v - u = 4(sqrt(3/8)+1): with these values the
/// closed-form x-update equals the Anscombe forward transform plus the
/// constant 2*sqrt(3/8).
double anscombe_equiv_lambda();
double anscombe_equiv_offset();

struct IterationStat {
    double lambda = 0.0;
    double sigma = 0.0;
    double primal_residual = 0.0; // ||x - v||_2
};

struct RunReport {
    std::string method;
    std::string denoiser;
    int iters = 0;
    double lambda0 = 0.0, lambda_step = 0.0, beta = 0.0;
    OutputKind output = OutputKind::denoised;
    double wall_ms = 0.0;
    std::vector<IterationStat> trace; // one entry per iteration

    /// Canonical CSV row: image,peak,kernel,method,psnr,iters,wall_ms.
    static std::string csv_header();
    std::string csv_row(const std::string& image, double peak, const std::string& kernel,
                        double psnr_db) const;
    /// Multi-line human-readable account of the run.
    std::string format_log() const;
};

struct RunResult {
    Image image;
    RunReport report;
};

/// Closed-form x-update of the separable (H = identity) case:
/// per pixel, the positive root of lambda x^2 + (1 - lambda(v-u)) x - y = 0.
/// Output is nonnegative for all inputs.
Image x_update_denoise(const Image& y, const Image& v, const Image& u, double lambda);

/// Scalar form of the same update; n_priors generalizes to the multi-prior
/// coupling (c_sum is the sum of v_j - u_j over priors).
double x_update_scalar(double y, double c_sum, double lambda, int n_priors);

/// x-update under a general H: minimizes
///   -y^T safe_log(Hx) + 1^T Hx + lambda/2 ||x - v + u||^2
/// with the limited-memory quasi-Newton solver, warm-started at x_warm.
/// epsilon <= 0 selects the scale-aware default knee.
Image x_update_general(const Image& y, const Image& v, const Image& u, double lambda,
                       const LinearOperator& H, const Image& x_warm, const LbfgsConfig& cfg = {},
                       double epsilon = 0.0);

/// Observer invoked after each iteration with (k, x, v, u); v and u are the
/// per-prior aggregates for multi-prior runs.
using IterateObserver = std::function<void(int, const Image&, const Image&, const Image&)>;
/// Multi-prior observer exposing every split variable.
using MultiIterateObserver =
    std::function<void(int, const Image&, const std::vector<Image>&, const std::vector<Image>&)>;

/// The plug-and-play splitting loop: x-update (closed form when H is the
/// identity, inner quasi-Newton solve otherwise), Gaussian denoising of
/// x + u at sigma_k, dual ascent, geometric lambda schedule. Returns the
/// final v by default (params.output selects x instead).
RunResult p4ip_run(const Image& y, const LinearOperator& H, const Denoiser& denoiser,
                   const SolverParams& params, const IterateObserver& observer = nullptr);

struct PriorSpec {
    Denoiser denoiser;
    double beta = 1.0;
};

/// Multi-prior variant: one split variable (v_j, u_j) per prior, each with
/// its own weight beta_j and denoiser. With a single prior the iterate
/// sequence is bit-identical to p4ip_run. The output averages the final v_j.
RunResult p4ip_multi_run(const Image& y, const LinearOperator& H,
                         const std::vector<PriorSpec>& priors, const SolverParams& params,
                         const MultiIterateObserver& observer = nullptr);

/// Samples the scalar closed-form x-update over y_grid (the per-pixel
/// transform curve traced by one denoising x-step).
std::vector<double> transform_curve(double lambda, double v_minus_u,
                                    const std::vector<double>& y_grid);

/// Low-SNR denoising path: bin counts down by params.binning_factor, run
/// the solver on the summed counts (presets rescaled for the factor^2
/// brighter peak), then interpolate back to the original size. Denoising
/// only: binning does not commute with a blur operator.
RunResult restore_with_binning(const Image& y, const Denoiser& denoiser,
                               const SolverParams& params);

} // namespace p4ip
