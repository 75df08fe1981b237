#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "p4ip/image.hpp"

namespace p4ip {

/// Degradation protocol: scale the clean scene to `peak`, blur with the
/// named kernel ("none" skips the blur), then sample Poisson counts.
struct DegradeOutput {
    Image clean_scaled; // reference for evaluation
    Image degraded;     // observed counts
};
DegradeOutput degrade_image(const Image& clean, double peak, const std::string& kernel_name,
                            std::uint64_t seed);

/// Metadata written next to a degraded raster (`<raster>.meta`).
struct SidecarMeta {
    double peak = 0.0;
    std::string kernel = "none";
    std::uint64_t seed = 0;
    std::string source; // path or synthetic spec of the clean image
};
std::string sidecar_path_for(const std::string& raster_path);
void write_sidecar(const std::string& raster_path, const SidecarMeta& meta);
SidecarMeta read_sidecar(const std::string& raster_path);

/// Loads "synthetic:<name>[:WxH]" (default 128x128), a PGM, or a raster
/// interchange file; format detected by content.
Image load_image_any(const std::string& spec);

/// Sweep configuration. INI-style key=value text; repeated keys build the
/// lists. Cells are the cross product images x peaks x kernels x methods x
/// seeds; the denoiser list applies to every cell (the first entry drives
/// single-prior methods, the full list forms the multi-prior set).
struct ExperimentConfig {
    std::vector<std::string> images;
    std::vector<double> peaks;
    std::vector<std::string> kernels;   // "none" or kernel names
    std::vector<std::string> methods;   // p4ip | p4ip-bin | m-p4ip | anscombe
    std::vector<std::string> denoisers; // gauss | nlm | tikhonov | ext:<file>
    std::vector<std::uint64_t> seeds;
    std::string output_dir = ".";
    int threads = 0; // 0 = logical cores

    std::optional<int> iters;
    std::optional<double> lambda0;
    std::optional<double> lambda_step;
    std::optional<double> beta;
};
ExperimentConfig parse_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config_stream(std::istream& in, const std::string& origin);

/// Runs every cell (worker pool, deterministic assembly order), writes
/// results.csv plus aggregate mean-PSNR rows and run.log under
/// cfg.output_dir. Per-cell failures are recorded and do not stop the
/// sweep. Returns the number of failed cells.
int run_experiment(const ExperimentConfig& cfg, std::ostream& progress);

} // namespace p4ip
