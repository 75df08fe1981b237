// Command-line surface for Poisson inverse problem restoration:
// degrade / restore / baseline / eval / curve / experiment.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <vector>

#include "p4ip/anscombe.hpp"
#include "p4ip/binning.hpp"
#include "p4ip/denoisers.hpp"
#include "p4ip/errors.hpp"
#include "p4ip/experiment.hpp"
#include "p4ip/metrics.hpp"
#include "p4ip/operators.hpp"
#include "p4ip/raster_io.hpp"
#include "p4ip/sampling.hpp"
#include "p4ip/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitSolver = 3;

std::string fmt_db(double v) {
    if (std::isinf(v)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

struct DegradeArgs {
    std::string input, output, kernel = "none", save_clean;
    double peak = 0.0;
    std::uint64_t seed = 0;
};

struct RestoreArgs {
    std::string input, output, method = "p4ip", report;
    std::vector<std::string> denoisers;
    std::string output_kind = "v";
    double peak = 0.0; // 0 = take from sidecar
    std::string kernel;
    int iters = 0;
    double lambda0 = 0.0, lambda_step = 0.0, beta = 0.0;
    bool verbose = false;
};

struct BaselineArgs {
    std::string input, output, denoiser = "nlm", inverse = "unbiased";
};

struct EvalArgs {
    std::string reference, test;
    double peak_max = 0.0;
};

struct CurveArgs {
    double lambda = p4ip::anscombe_equiv_lambda();
    std::vector<double> offsets;
    double y_max = 100.0, step = 0.1;
    std::string output;
};

struct ExperimentArgs {
    std::string config, output_dir;
    int threads = 0;
};

int do_degrade(const DegradeArgs& a) {
    const p4ip::Image clean = p4ip::load_image_any(a.input);
    const p4ip::DegradeOutput out = p4ip::degrade_image(clean, a.peak, a.kernel, a.seed);
    p4ip::save_raster(out.degraded, a.output);
    p4ip::write_sidecar(a.output, {a.peak, a.kernel, a.seed, a.input});
    if (!a.save_clean.empty()) {
        p4ip::save_raster(out.clean_scaled, a.save_clean);
    }
    std::cout << "degraded " << a.input << " -> " << a.output << " (peak=" << a.peak
              << " kernel=" << a.kernel << " seed=" << a.seed << ")\n";
    return kExitOk;
}

int do_restore(const RestoreArgs& a) {
    const p4ip::Image y = p4ip::load_image_any(a.input);

    double peak = a.peak;
    std::string kernel = a.kernel;
    if (peak <= 0.0 || kernel.empty()) {
        const p4ip::SidecarMeta meta = p4ip::read_sidecar(a.input);
        if (peak <= 0.0) peak = meta.peak;
        if (kernel.empty()) kernel = meta.kernel;
    }
    const bool blurred = kernel != "none";

    std::vector<std::string> denoisers = a.denoisers;
    if (denoisers.empty()) {
        denoisers.push_back("nlm");
    }

    p4ip::RunResult result;
    if (a.method == "anscombe") {
        p4ip::VstPipelineConfig vst;
        vst.denoiser = p4ip::denoiser_by_name(denoisers[0]);
        result.image = p4ip::vst_restore(y, vst);
        result.report.method = "anscombe";
        result.report.denoiser = vst.denoiser.name;
        result.report.iters = 1;
    } else {
        p4ip::SolverParams p = blurred ? p4ip::deblur_params_for_peak(peak)
                                       : p4ip::denoise_params_for_peak(peak);
        if (a.iters > 0) p.iters = a.iters;
        if (a.lambda0 > 0.0) p.lambda0 = a.lambda0;
        if (a.lambda_step > 0.0) p.lambda_step = a.lambda_step;
        if (a.beta > 0.0) p.beta = a.beta;
        p.output = (a.output_kind == "x") ? p4ip::OutputKind::primal : p4ip::OutputKind::denoised;

        if (a.method == "p4ip-bin") {
            if (blurred) {
                throw p4ip::data_error("p4ip-bin applies to the denoising scenario only");
            }
            p.binning_factor = 3;
            result = p4ip::restore_with_binning(y, p4ip::denoiser_by_name(denoisers[0]), p);
        } else if (a.method == "m-p4ip") {
            std::vector<p4ip::PriorSpec> priors;
            for (const std::string& sel : denoisers) {
                priors.push_back({p4ip::denoiser_by_name(sel), p.beta});
            }
            const auto H = blurred
                               ? p4ip::LinearOperator::convolution(p4ip::kernel_by_name(kernel),
                                                                   y.width, y.height)
                               : p4ip::LinearOperator::identity(y.width, y.height);
            result = p4ip::p4ip_multi_run(y, H, priors, p);
        } else if (a.method == "p4ip") {
            const auto H = blurred
                               ? p4ip::LinearOperator::convolution(p4ip::kernel_by_name(kernel),
                                                                   y.width, y.height)
                               : p4ip::LinearOperator::identity(y.width, y.height);
            result = p4ip::p4ip_run(y, H, p4ip::denoiser_by_name(denoisers[0]), p);
        } else {
            throw p4ip::data_error("unknown method '" + a.method + "'");
        }
    }

    p4ip::save_raster(result.image, a.output);
    const std::string row = result.report.csv_row(a.input, peak, kernel, std::nan(""));
    std::cout << p4ip::RunReport::csv_header() << "\n" << row << "\n";
    if (a.verbose) {
        std::cout << result.report.format_log();
    }
    if (!a.report.empty()) {
        std::ofstream rep(a.report, std::ios::app);
        if (!rep) {
            throw p4ip::data_error("cannot open report file '" + a.report + "'");
        }
        rep << row << "\n";
    }
    return kExitOk;
}

int do_baseline(const BaselineArgs& a) {
    const p4ip::Image y = p4ip::load_image_any(a.input);
    p4ip::VstPipelineConfig cfg;
    cfg.denoiser = p4ip::denoiser_by_name(a.denoiser);
    cfg.inverse =
        (a.inverse == "algebraic") ? p4ip::VstInverse::algebraic : p4ip::VstInverse::unbiased;
    p4ip::save_raster(p4ip::vst_restore(y, cfg), a.output);
    std::cout << "baseline (" << a.inverse << " inverse, denoiser " << cfg.denoiser.name << ") -> "
              << a.output << "\n";
    return kExitOk;
}

int do_eval(const EvalArgs& a) {
    const p4ip::Image ref = p4ip::load_image_any(a.reference);
    const p4ip::Image test = p4ip::load_image_any(a.test);
    std::cout << fmt_db(p4ip::psnr(ref, test, a.peak_max)) << "\n";
    return kExitOk;
}

int do_curve(const CurveArgs& a) {
    std::vector<double> offsets = a.offsets;
    if (offsets.empty()) {
        for (int i : {0, 3, 6, 9}) {
            offsets.push_back(p4ip::anscombe_equiv_offset() + i);
        }
    }
    std::vector<double> grid;
    for (double y = 0.0; y <= a.y_max + 1e-12; y += a.step) {
        grid.push_back(y);
        if (a.step <= 0.0) break;
    }

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!a.output.empty()) {
        file.open(a.output);
        if (!file) {
            throw p4ip::data_error("cannot open '" + a.output + "'");
        }
        out = &file;
    }

    *out << "y,anscombe";
    for (double c : offsets) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), ",p4ip_vmu_%g", c);
        *out << buf;
    }
    *out << "\n";
    std::vector<std::vector<double>> curves;
    for (double c : offsets) {
        curves.push_back(p4ip::transform_curve(a.lambda, c, grid));
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6f,%.12f", grid[i], p4ip::anscombe_forward(grid[i]));
        *out << buf;
        for (const auto& curve : curves) {
            std::snprintf(buf, sizeof(buf), ",%.12f", curve[i]);
            *out << buf;
        }
        *out << "\n";
    }
    return kExitOk;
}

int do_experiment(const ExperimentArgs& a) {
    p4ip::ExperimentConfig cfg = p4ip::parse_experiment_config(a.config);
    if (!a.output_dir.empty()) cfg.output_dir = a.output_dir;
    if (a.threads > 0) cfg.threads = a.threads;
    const int failures = p4ip::run_experiment(cfg, std::cout);
    std::cout << "experiment complete, results under " << cfg.output_dir
              << (failures ? (" (" + std::to_string(failures) + " cell(s) failed)") : "") << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Plug-and-play splitting solver for Poisson inverse problems"};
    app.require_subcommand(1);

    // Global defaults; the matching per-subcommand options take precedence.
    std::uint64_t global_seed = 0;
    int global_threads = 0;
    std::string global_output_dir;
    auto* g_seed = app.add_option("--seed", global_seed, "Default sampling seed");
    app.add_option("--threads", global_threads, "Default worker pool size");
    app.add_option("--output-dir", global_output_dir, "Default experiment output directory");

    DegradeArgs dg;
    auto* degrade = app.add_subcommand("degrade", "Scale, optionally blur, then Poisson-sample");
    degrade->add_option("--input", dg.input, "Clean image (pgm, raster, or synthetic:<name>[:WxH])")
        ->required();
    degrade->add_option("--peak", dg.peak, "Peak intensity of the scaled scene")
        ->required()
        ->check(CLI::PositiveNumber);
    degrade->add_option("--kernel", dg.kernel, "none|gaussian25|cauchy15|uniform9|<raster>");
    auto* dg_seed = degrade->add_option("--seed", dg.seed, "Sampling seed");
    degrade->add_option("--output", dg.output, "Output raster path")->required();
    degrade->add_option("--save-clean", dg.save_clean, "Also write the scaled clean reference");

    RestoreArgs rs;
    auto* restore = app.add_subcommand("restore", "Run a splitting-solver restoration");
    restore->add_option("--input", rs.input, "Degraded raster (sidecar supplies peak/kernel)")
        ->required();
    restore->add_option("--method", rs.method, "p4ip|p4ip-bin|m-p4ip|anscombe");
    restore->add_option("--denoiser", rs.denoisers,
                        "gauss|nlm|tikhonov|ext:<spec> (repeat for m-p4ip priors)");
    restore->add_option("--output", rs.output, "Restored raster path")->required();
    restore->add_option("--peak", rs.peak, "Override sidecar peak");
    restore->add_option("--kernel", rs.kernel, "Override sidecar kernel");
    restore->add_option("--iters", rs.iters, "Iteration count");
    restore->add_option("--lambda0", rs.lambda0, "Initial coupling weight");
    restore->add_option("--lambda-step", rs.lambda_step, "Per-iteration multiplier");
    restore->add_option("--beta", rs.beta, "Prior weight");
    restore->add_option("--output-kind", rs.output_kind, "v (denoised iterate) or x (primal)")
        ->check(CLI::IsMember({"v", "x"}));
    restore->add_option("--report", rs.report, "Append a CSV report row to this file");
    restore->add_flag("--verbose", rs.verbose, "Also print the per-iteration log");

    BaselineArgs bl;
    auto* baseline = app.add_subcommand("baseline", "Variance-stabilizing transform baseline");
    baseline->add_option("--input", bl.input, "Degraded raster")->required();
    baseline->add_option("--denoiser", bl.denoiser, "gauss|nlm|tikhonov|ext:<spec>");
    baseline->add_option("--inverse", bl.inverse, "algebraic|unbiased")
        ->check(CLI::IsMember({"algebraic", "unbiased"}));
    baseline->add_option("--output", bl.output, "Restored raster path")->required();

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "Print PSNR of test against reference");
    eval->add_option("--reference", ev.reference, "Reference image")->required();
    eval->add_option("--test", ev.test, "Image under test")->required();
    eval->add_option("--peak-max", ev.peak_max, "Peak used in the PSNR numerator")
        ->required()
        ->check(CLI::PositiveNumber);

    CurveArgs cv;
    auto* curve = app.add_subcommand("curve", "Emit x-update transform curves as CSV");
    curve->add_option("--lambda", cv.lambda, "Coupling weight (default 0.25)");
    curve->add_option("--v-minus-u", cv.offsets,
                      "Curve offsets; default is the stabilizing family 4(sqrt(3/8)+1)+{0,3,6,9}");
    curve->add_option("--y-max", cv.y_max, "Grid upper end");
    curve->add_option("--step", cv.step, "Grid spacing");
    curve->add_option("--output", cv.output, "CSV path (stdout if omitted)");

    ExperimentArgs ex;
    auto* experiment = app.add_subcommand("experiment", "Run a degrade/restore/eval sweep");
    experiment->add_option("--config", ex.config, "INI config file")->required();
    experiment->add_option("--output-dir", ex.output_dir, "Override config output_dir");
    experiment->add_option("--threads", ex.threads, "Worker pool size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (*degrade && dg_seed->count() == 0) {
        if (g_seed->count() == 0) {
            std::cerr << "degrade: a seed is required (--seed)\n";
            return kExitUsage;
        }
        dg.seed = global_seed;
    }
    if (*experiment) {
        if (ex.threads <= 0 && global_threads > 0) ex.threads = global_threads;
        if (ex.output_dir.empty()) ex.output_dir = global_output_dir;
    }

    try {
        if (*degrade) return do_degrade(dg);
        if (*restore) return do_restore(rs);
        if (*baseline) return do_baseline(bl);
        if (*eval) return do_eval(ev);
        if (*curve) return do_curve(cv);
        if (*experiment) return do_experiment(ex);
    } catch (const p4ip::solver_error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const p4ip::data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
