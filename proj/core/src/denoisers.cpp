#include "p4ip/denoisers.hpp"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "p4ip/errors.hpp"
#include "p4ip/raster_io.hpp"

namespace p4ip {

Image Denoiser::operator()(const Image& z, double sigma) const {
    if (!denoise) {
        throw solver_error("denoiser '" + name + "' has no implementation");
    }
    Image out = denoise(z, sigma);
    if (!out.same_dims(z)) {
        throw solver_error("denoiser '" + name + "' changed image dimensions");
    }
    for (double v : out.data) {
        if (!std::isfinite(v)) {
            throw solver_error("denoiser '" + name + "' produced non-finite values");
        }
    }
    return out;
}

namespace {

// Symmetric padding with edge duplication; bounces cover stencils wider
// than the image.
inline int reflect(int i, int n) {
    while (i < 0 || i >= n) {
        i = (i < 0) ? -i - 1 : 2 * n - 1 - i;
    }
    return i;
}

std::vector<double> gaussian_taps(double sigma_s, int half) {
    std::vector<double> taps(2 * half + 1);
    double sum = 0.0;
    for (int i = -half; i <= half; ++i) {
        taps[i + half] = std::exp(-(i * i) / (2.0 * sigma_s * sigma_s));
        sum += taps[i + half];
    }
    for (double& t : taps) {
        t /= sum;
    }
    return taps;
}

Image gaussian_smooth(const Image& z, double sigma) {
    const double sigma_s = std::clamp(sigma / 2.0, 0.5, 3.0);
    const int half = static_cast<int>(std::ceil(3.0 * sigma_s));
    const std::vector<double> taps = gaussian_taps(sigma_s, half);

    Image rows(z.width, z.height);
    for (int r = 0; r < z.height; ++r) {
        for (int c = 0; c < z.width; ++c) {
            double acc = 0.0;
            for (int i = -half; i <= half; ++i) {
                acc += taps[i + half] * z.at(r, reflect(c + i, z.width));
            }
            rows.at(r, c) = acc;
        }
    }
    Image out(z.width, z.height);
    for (int r = 0; r < z.height; ++r) {
        for (int c = 0; c < z.width; ++c) {
            double acc = 0.0;
            for (int i = -half; i <= half; ++i) {
                acc += taps[i + half] * rows.at(reflect(r + i, z.height), c);
            }
            out.at(r, c) = acc;
        }
    }
    return out;
}

} // namespace

Denoiser gaussian_filter_denoiser() {
    Denoiser d;
    d.name = "gauss";
    d.denoise = [](const Image& z, double sigma) { return gaussian_smooth(z, sigma); };
    return d;
}

namespace {

Image nlm_denoise(const Image& z, double sigma, int patch, int window) {
    if (z.width < window || z.height < window) {
        return gaussian_smooth(z, sigma);
    }
    if (sigma <= 0.0) {
        return z; // h = 0 degenerates to the identity
    }
    const double h = 0.8 * sigma * patch;
    const double inv_h2 = 1.0 / (h * h);
    const int half_p = patch / 2;
    const int half_w = window / 2;
    const int margin = half_p + half_w;

    // Pad once; all patch reads become unconditional.
    const int pw = z.width + 2 * margin, ph = z.height + 2 * margin;
    std::vector<double> pad(static_cast<std::size_t>(pw) * ph);
    for (int r = 0; r < ph; ++r) {
        const int zr = reflect(r - margin, z.height);
        for (int c = 0; c < pw; ++c) {
            pad[static_cast<std::size_t>(r) * pw + c] = z.at(zr, reflect(c - margin, z.width));
        }
    }
    const auto P = [&](int r, int c) { return pad[static_cast<std::size_t>(r) * pw + c]; };
    const double inv_patch_area = 1.0 / (static_cast<double>(patch) * patch);

    Image out(z.width, z.height);
    for (int r = 0; r < z.height; ++r) {
        for (int c = 0; c < z.width; ++c) {
            const int cr = r + margin, cc = c + margin;
            double acc = 0.0, wsum = 0.0;
            for (int dy = -half_w; dy <= half_w; ++dy) {
                for (int dx = -half_w; dx <= half_w; ++dx) {
                    double d2 = 0.0;
                    for (int i = -half_p; i <= half_p; ++i) {
                        for (int j = -half_p; j <= half_p; ++j) {
                            const double diff = P(cr + i, cc + j) - P(cr + dy + i, cc + dx + j);
                            d2 += diff * diff;
                        }
                    }
                    const double w = std::exp(-d2 * inv_patch_area * inv_h2);
                    acc += w * P(cr + dy, cc + dx);
                    wsum += w;
                }
            }
            out.at(r, c) = acc / wsum;
        }
    }
    return out;
}

} // namespace

Denoiser nlm_denoiser(int patch, int window) {
    if (patch % 2 == 0 || window % 2 == 0 || patch >= window) {
        throw data_error("nlm_denoiser: patch and window must be odd with patch < window");
    }
    Denoiser d;
    d.name = "nlm";
    d.denoise = [patch, window](const Image& z, double sigma) {
        return nlm_denoise(z, sigma, patch, window);
    };
    return d;
}

Denoiser tikhonov_prox_denoiser(double beta_internal) {
    if (!(beta_internal > 0.0)) {
        throw data_error("tikhonov_prox_denoiser: beta_internal must be positive");
    }
    Denoiser d;
    d.name = "tikhonov";
    d.denoise = [beta_internal](const Image& z, double sigma) {
        Image out = z;
        const double shrink = 1.0 / (1.0 + sigma * sigma * beta_internal);
        for (double& v : out.data) {
            v *= shrink;
        }
        return out;
    };
    return d;
}

namespace {

std::string substitute_all(std::string s, const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = s.find(key, pos)) != std::string::npos) {
        s.replace(pos, key.size(), value);
        pos += value.size();
    }
    return s;
}

// Runs `command` through /bin/sh with a wall-clock timeout.
// Returns the exit status; -1 means the child was killed on timeout.
int run_with_timeout(const std::string& command, double timeout_sec) {
    const pid_t pid = fork();
    if (pid < 0) {
        throw solver_error("external denoiser: fork failed");
    }
    if (pid == 0) {
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_sec);
    for (;;) {
        int status = 0;
        const pid_t r = waitpid(pid, &status, WNOHANG);
        if (r == pid) {
            return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
        }
        if (r < 0) {
            throw solver_error("external denoiser: waitpid failed");
        }
        if (std::chrono::steady_clock::now() >= deadline) {
            kill(pid, SIGKILL);
            waitpid(pid, &status, 0);
            return -1;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
}

std::string fresh_temp_path(const char* tag) {
    static std::atomic<unsigned> counter{0};
    const unsigned n = counter.fetch_add(1);
    return (std::filesystem::temp_directory_path() /
            ("p4ip_" + std::to_string(getpid()) + "_" + std::to_string(n) + "_" + tag + ".raster"))
        .string();
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

ExternalDenoiserSpec load_denoiser_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw data_error("load_denoiser_spec: cannot open '" + path + "'");
    }
    ExternalDenoiserSpec spec;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw data_error("load_denoiser_spec: malformed line '" + t + "'");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key == "command") {
            spec.command = value;
        } else if (key == "timeout_sec") {
            spec.timeout_sec = std::stod(value);
        } else {
            throw data_error("load_denoiser_spec: unknown key '" + key + "'");
        }
    }
    for (const char* ph : {"{input}", "{sigma}", "{output}"}) {
        if (spec.command.find(ph) == std::string::npos) {
            throw data_error(std::string("load_denoiser_spec: command template missing ") + ph);
        }
    }
    if (!(spec.timeout_sec > 0.0)) {
        throw data_error("load_denoiser_spec: timeout_sec must be positive");
    }
    return spec;
}

Denoiser external_denoiser(ExternalDenoiserSpec spec) {
    for (const char* ph : {"{input}", "{sigma}", "{output}"}) {
        if (spec.command.find(ph) == std::string::npos) {
            throw data_error(std::string("external_denoiser: command template missing ") + ph);
        }
    }
    auto guard = std::make_shared<std::mutex>(); // one subprocess at a time per handle
    Denoiser d;
    d.name = "ext";
    d.denoise = [spec, guard](const Image& z, double sigma) {
        std::lock_guard<std::mutex> lock(*guard);
        const std::string in_path = fresh_temp_path("in");
        const std::string out_path = fresh_temp_path("out");
        char sigma_str[40];
        std::snprintf(sigma_str, sizeof(sigma_str), "%.17g", sigma);

        std::string cmd = substitute_all(spec.command, "{input}", in_path);
        cmd = substitute_all(cmd, "{sigma}", sigma_str);
        cmd = substitute_all(cmd, "{output}", out_path);

        save_raster(z, in_path);
        const auto cleanup = [&] {
            std::error_code ec;
            std::filesystem::remove(in_path, ec);
            std::filesystem::remove(out_path, ec);
        };
        int status = -2;
        try {
            status = run_with_timeout(cmd, spec.timeout_sec);
        } catch (...) {
            cleanup();
            throw;
        }
        if (status == -1) {
            cleanup();
            throw solver_error("external denoiser timed out after " +
                               std::to_string(spec.timeout_sec) + " s: " + cmd);
        }
        if (status != 0) {
            cleanup();
            throw solver_error("external denoiser exited with status " + std::to_string(status) +
                               ": " + cmd);
        }
        Image out;
        try {
            out = load_raster(out_path);
        } catch (const data_error& e) {
            cleanup();
            throw solver_error(std::string("external denoiser produced unreadable output: ") +
                               e.what());
        }
        cleanup();
        if (!out.same_dims(z)) {
            throw solver_error("external denoiser returned wrong dimensions");
        }
        return out;
    };
    return d;
}

Denoiser denoiser_by_name(const std::string& selector) {
    if (selector == "gauss") return gaussian_filter_denoiser();
    if (selector == "nlm") return nlm_denoiser();
    if (selector == "tikhonov") return tikhonov_prox_denoiser();
    if (selector.rfind("ext:", 0) == 0) {
        return external_denoiser(load_denoiser_spec(selector.substr(4)));
    }
    throw data_error("unknown denoiser '" + selector + "' (expected gauss|nlm|tikhonov|ext:<file>)");
}

} // namespace p4ip
