#include "p4ip/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "p4ip/anscombe.hpp"
#include "p4ip/binning.hpp"
#include "p4ip/denoisers.hpp"
#include "p4ip/errors.hpp"
#include "p4ip/metrics.hpp"
#include "p4ip/operators.hpp"
#include "p4ip/raster_io.hpp"
#include "p4ip/sampling.hpp"
#include "p4ip/solver.hpp"

namespace p4ip {

DegradeOutput degrade_image(const Image& clean, double peak, const std::string& kernel_name,
                            std::uint64_t seed) {
    DegradeOutput out;
    out.clean_scaled = scale_to_peak(clean, peak);
    Image intensity = out.clean_scaled;
    if (kernel_name != "none") {
        const LinearOperator H =
            LinearOperator::convolution(kernel_by_name(kernel_name), clean.width, clean.height);
        intensity = H.apply(intensity);
    }
    out.degraded = poisson_sample(intensity, seed);
    return out;
}

std::string sidecar_path_for(const std::string& raster_path) { return raster_path + ".meta"; }

void write_sidecar(const std::string& raster_path, const SidecarMeta& meta) {
    const std::string path = sidecar_path_for(raster_path);
    std::ofstream out(path);
    if (!out) {
        throw data_error("write_sidecar: cannot open '" + path + "'");
    }
    char peak_str[40];
    std::snprintf(peak_str, sizeof(peak_str), "%.17g", meta.peak);
    out << "peak = " << peak_str << "\n"
        << "kernel = " << meta.kernel << "\n"
        << "seed = " << meta.seed << "\n"
        << "source = " << meta.source << "\n";
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

SidecarMeta read_sidecar(const std::string& raster_path) {
    const std::string path = sidecar_path_for(raster_path);
    std::ifstream in(path);
    if (!in) {
        throw data_error("read_sidecar: cannot open '" + path + "'");
    }
    SidecarMeta meta;
    bool have_peak = false;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw data_error("read_sidecar: malformed line '" + t + "' in " + path);
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key == "peak") {
            meta.peak = std::stod(value);
            have_peak = true;
        } else if (key == "kernel") {
            meta.kernel = value;
        } else if (key == "seed") {
            meta.seed = std::stoull(value);
        } else if (key == "source") {
            meta.source = value;
        }
    }
    if (!have_peak || !(meta.peak > 0.0)) {
        throw data_error("read_sidecar: missing or invalid peak in " + path);
    }
    return meta;
}

Image load_image_any(const std::string& spec) {
    if (spec.rfind("synthetic:", 0) == 0) {
        std::string rest = spec.substr(10);
        int w = 128, h = 128;
        const auto colon = rest.find(':');
        if (colon != std::string::npos) {
            const std::string dims = rest.substr(colon + 1);
            rest = rest.substr(0, colon);
            const auto x = dims.find('x');
            if (x == std::string::npos) {
                throw data_error("load_image_any: bad synthetic dims '" + dims + "' (want WxH)");
            }
            w = std::stoi(dims.substr(0, x));
            h = std::stoi(dims.substr(x + 1));
        }
        return synthetic_scene(rest, w, h);
    }
    std::ifstream probe(spec, std::ios::binary);
    if (!probe) {
        throw data_error("load_image_any: cannot open '" + spec + "'");
    }
    char head[8] = {};
    probe.read(head, 8);
    probe.close();
    if (std::equal(head, head + 8, kRasterMagic)) {
        return load_raster(spec);
    }
    if (head[0] == 'P' && (head[1] == '2' || head[1] == '5')) {
        return load_pgm(spec);
    }
    throw data_error("load_image_any: '" + spec + "' is neither a raster nor a PGM");
}

ExperimentConfig parse_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw data_error("parse_experiment_config: cannot open '" + path + "'");
    }
    return parse_experiment_config_stream(in, path);
}

ExperimentConfig parse_experiment_config_stream(std::istream& in, const std::string& origin) {
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw data_error("config " + origin + ":" + std::to_string(lineno) +
                             ": expected key = value");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        try {
            if (key == "image") {
                cfg.images.push_back(value);
            } else if (key == "peak") {
                cfg.peaks.push_back(std::stod(value));
            } else if (key == "kernel") {
                cfg.kernels.push_back(value);
            } else if (key == "method") {
                cfg.methods.push_back(value);
            } else if (key == "denoiser") {
                cfg.denoisers.push_back(value);
            } else if (key == "seed") {
                cfg.seeds.push_back(std::stoull(value));
            } else if (key == "output_dir") {
                cfg.output_dir = value;
            } else if (key == "threads") {
                cfg.threads = std::stoi(value);
            } else if (key == "iters") {
                cfg.iters = std::stoi(value);
            } else if (key == "lambda0") {
                cfg.lambda0 = std::stod(value);
            } else if (key == "lambda_step") {
                cfg.lambda_step = std::stod(value);
            } else if (key == "beta") {
                cfg.beta = std::stod(value);
            } else {
                throw data_error("unknown key '" + key + "'");
            }
        } catch (const data_error&) {
            throw;
        } catch (const std::exception&) {
            throw data_error("config " + origin + ":" + std::to_string(lineno) +
                             ": bad value for '" + key + "'");
        }
    }
    if (cfg.images.empty() || cfg.peaks.empty() || cfg.methods.empty() || cfg.seeds.empty()) {
        throw data_error("config " + origin + ": image, peak, method and seed are all required");
    }
    if (cfg.kernels.empty()) {
        cfg.kernels.push_back("none");
    }
    if (cfg.denoisers.empty()) {
        cfg.denoisers.push_back("nlm");
    }
    return cfg;
}

namespace {

struct Cell {
    std::string image;
    double peak;
    std::string kernel;
    std::string method;
    std::uint64_t seed;
};

struct CellOutcome {
    double psnr_noisy = 0.0;
    double psnr_restored = 0.0;
    int iters = 0;
    double wall_ms = 0.0;
    bool ok = false;
    std::string error;
};

std::string fmt_db(double v) {
    if (std::isinf(v)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_peak(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return s;
}

SolverParams params_for(const ExperimentConfig& cfg, double peak, bool deblur) {
    SolverParams p = deblur ? deblur_params_for_peak(peak) : denoise_params_for_peak(peak);
    if (cfg.iters) p.iters = *cfg.iters;
    if (cfg.lambda0) p.lambda0 = *cfg.lambda0;
    if (cfg.lambda_step) p.lambda_step = *cfg.lambda_step;
    if (cfg.beta) p.beta = *cfg.beta;
    return p;
}

CellOutcome run_cell(const ExperimentConfig& cfg, const Cell& cell) {
    CellOutcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const Image clean = load_image_any(cell.image);
        const DegradeOutput deg = degrade_image(clean, cell.peak, cell.kernel, cell.seed);
        out.psnr_noisy = psnr(deg.clean_scaled, deg.degraded, cell.peak);

        const bool blurred = cell.kernel != "none";
        Image restored;
        if (cell.method == "anscombe") {
            VstPipelineConfig vst;
            vst.denoiser = denoiser_by_name(cfg.denoisers[0]);
            restored = vst_restore(deg.degraded, vst);
            out.iters = 1;
        } else if (cell.method == "p4ip" || cell.method == "p4ip-bin") {
            SolverParams p = params_for(cfg, cell.peak, blurred);
            const Denoiser den = denoiser_by_name(cfg.denoisers[0]);
            if (cell.method == "p4ip-bin") {
                if (blurred) {
                    throw data_error("binning applies to the denoising scenario only");
                }
                p.binning_factor = 3;
                RunResult r = restore_with_binning(deg.degraded, den, p);
                restored = std::move(r.image);
                out.iters = r.report.iters;
            } else {
                const LinearOperator H =
                    blurred ? LinearOperator::convolution(kernel_by_name(cell.kernel),
                                                          deg.degraded.width, deg.degraded.height)
                            : LinearOperator::identity(deg.degraded.width, deg.degraded.height);
                RunResult r = p4ip_run(deg.degraded, H, den, p);
                restored = std::move(r.image);
                out.iters = r.report.iters;
            }
        } else if (cell.method == "m-p4ip") {
            SolverParams p = params_for(cfg, cell.peak, blurred);
            std::vector<PriorSpec> priors;
            for (const std::string& sel : cfg.denoisers) {
                priors.push_back({denoiser_by_name(sel), p.beta});
            }
            const LinearOperator H =
                blurred ? LinearOperator::convolution(kernel_by_name(cell.kernel),
                                                      deg.degraded.width, deg.degraded.height)
                        : LinearOperator::identity(deg.degraded.width, deg.degraded.height);
            RunResult r = p4ip_multi_run(deg.degraded, H, priors, p);
            restored = std::move(r.image);
            out.iters = r.report.iters;
        } else {
            throw data_error("unknown method '" + cell.method + "'");
        }

        out.psnr_restored = psnr(deg.clean_scaled, restored, cell.peak);
        out.ok = true;
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = sanitize(e.what());
    }
    out.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

} // namespace

int run_experiment(const ExperimentConfig& cfg, std::ostream& progress) {
    std::vector<Cell> cells;
    for (const std::string& image : cfg.images) {
        for (double peak : cfg.peaks) {
            for (const std::string& kernel : cfg.kernels) {
                for (const std::string& method : cfg.methods) {
                    for (std::uint64_t seed : cfg.seeds) {
                        cells.push_back({image, peak, kernel, method, seed});
                    }
                }
            }
        }
    }

    std::vector<CellOutcome> outcomes(cells.size());
    std::atomic<std::size_t> next{0};
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads =
        cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : hw;

    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) break;
            outcomes[i] = run_cell(cfg, cells[i]);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }

    std::filesystem::create_directories(cfg.output_dir);
    const std::string csv_path = cfg.output_dir + "/results.csv";
    const std::string log_path = cfg.output_dir + "/run.log";
    std::ofstream csv(csv_path);
    std::ofstream log(log_path);
    if (!csv || !log) {
        throw data_error("run_experiment: cannot write outputs under '" + cfg.output_dir + "'");
    }

    // wall_ms stays in the last column so determinism checks can drop it.
    csv << "image,peak,kernel,method,denoiser,seed,psnr_noisy,psnr,iters,status,wall_ms\n";
    int failures = 0;
    std::string denoiser_label = cfg.denoisers[0];
    for (std::size_t j = 1; j < cfg.denoisers.size(); ++j) {
        denoiser_label += "+" + cfg.denoisers[j];
    }

    struct Agg {
        double sum = 0.0;
        int ok = 0;
        int total = 0;
    };
    std::map<std::string, Agg> aggregates; // key in first-appearance order via ordered keys
    std::vector<std::string> agg_order;

    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Cell& c = cells[i];
        const CellOutcome& o = outcomes[i];
        const std::string den =
            (c.method == "m-p4ip") ? denoiser_label : cfg.denoisers[0];
        csv << sanitize(c.image) << ',' << fmt_peak(c.peak) << ',' << c.kernel << ',' << c.method
            << ',' << den << ',' << c.seed << ',';
        if (o.ok) {
            csv << fmt_db(o.psnr_noisy) << ',' << fmt_db(o.psnr_restored) << ',' << o.iters
                << ",ok,";
        } else {
            csv << ",,," << "error: " << o.error << ',';
            ++failures;
        }
        csv << static_cast<long long>(o.wall_ms) << '\n';

        const std::string key = fmt_peak(c.peak) + "," + c.kernel + "," + c.method + "," + den;
        auto it = aggregates.find(key);
        if (it == aggregates.end()) {
            it = aggregates.emplace(key, Agg{}).first;
            agg_order.push_back(key);
        }
        it->second.total += 1;
        if (o.ok && std::isfinite(o.psnr_restored)) {
            it->second.sum += o.psnr_restored;
            it->second.ok += 1;
        }

        progress << "[" << (i + 1) << "/" << cells.size() << "] " << c.image << " peak=" << c.peak
                 << " kernel=" << c.kernel << " method=" << c.method << " seed=" << c.seed << " -> "
                 << (o.ok ? ("psnr=" + fmt_db(o.psnr_restored)) : ("error: " + o.error)) << "\n";
        log << c.image << " peak=" << c.peak << " kernel=" << c.kernel << " method=" << c.method
            << " seed=" << c.seed << " status=" << (o.ok ? "ok" : o.error)
            << " psnr_noisy=" << fmt_db(o.psnr_noisy) << " psnr=" << fmt_db(o.psnr_restored)
            << " wall_ms=" << static_cast<long long>(o.wall_ms) << "\n";
    }

    for (const std::string& key : agg_order) {
        const Agg& a = aggregates.at(key);
        csv << "Average," << key << ",,,";
        if (a.ok > 0) {
            csv << fmt_db(a.sum / a.ok);
        }
        csv << ',' << ',' << (a.ok == a.total ? "ok" : "partial") << ",0\n";
    }
    return failures;
}

} // namespace p4ip
