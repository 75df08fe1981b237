#pragma once

#include <functional>
#include <string>

#include "p4ip/image.hpp"

namespace p4ip {

/// Black-box Gaussian denoiser contract: given an image and the noise
/// standard deviation sigma (in the image's own intensity units), produce a
/// same-sized, finite estimate. Implementations must be deterministic.
struct Denoiser {
    std::string name;
    std::function<Image(const Image&, double)> denoise;

    /// Invokes the denoiser and enforces the contract (dimensions,
    /// finiteness) on the result. Violations raise solver_error.
    Image operator()(const Image& z, double sigma) const;
};

/// Plain Gaussian smoothing whose spatial width grows with sigma:
/// sigma_s = clamp(sigma/2, 0.5, 3), kernel side 2*ceil(3*sigma_s)+1,
/// symmetric-padded. The weakest built-in; useful as a fast baseline.
Denoiser gaussian_filter_denoiser();

/// Non-local means with symmetric-padded patch comparisons and filtering
/// parameter h = 0.8 * sigma * patch. Images smaller than the search window
/// fall back to gaussian_filter_denoiser. The strongest built-in.
Denoiser nlm_denoiser(int patch = 5, int window = 11);

/// Exactly solvable prox denoiser for the quadratic prior
/// beta_internal/2 ||v||^2: returns z / (1 + sigma^2 * beta_internal).
/// Its first-order optimality residual (v - z)/sigma^2 + beta_internal*v = 0
/// holds to machine precision, which makes it the solver-level test oracle.
Denoiser tikhonov_prox_denoiser(double beta_internal = 1.0);

/// Bridge to an out-of-process denoiser executable.
struct ExternalDenoiserSpec {
    /// Command template; must contain {input}, {sigma} and {output}
    /// placeholders. The input/output files use the raster interchange
    /// format, sigma is passed as a decimal string. Exit code 0 = success.
    std::string command;
    double timeout_sec = 60.0;
};

/// Parses a key=value spec file with keys `command` and `timeout_sec`.
ExternalDenoiserSpec load_denoiser_spec(const std::string& path);

/// Wraps the spec as a Denoiser. Each handle serializes its own
/// invocations; distinct handles may run concurrently. Nonzero exit,
/// timeout or malformed output surface as solver_error.
Denoiser external_denoiser(ExternalDenoiserSpec spec);

/// Resolves a CLI selector: "gauss" | "nlm" | "tikhonov" | "ext:<spec-file>".
Denoiser denoiser_by_name(const std::string& selector);

} // namespace p4ip
