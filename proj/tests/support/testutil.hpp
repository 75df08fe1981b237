#pragma once

#include <unistd.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "p4ip/image.hpp"

namespace testutil {

// Self-cleaning unique directory under the system temp path.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        path_ = base / (tag + "_" + std::to_string(rd()) + "_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline bool bit_equal(const p4ip::Image& a, const p4ip::Image& b) {
    return a.width == b.width && a.height == b.height &&
           std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(double)) == 0;
}

inline double max_abs_diff(const p4ip::Image& a, const p4ip::Image& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        m = std::max(m, std::fabs(a.data[i] - b.data[i]));
    }
    return m;
}

inline p4ip::Image random_image(int w, int h, double lo, double hi, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    p4ip::Image img(w, h);
    for (double& v : img.data) {
        v = lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    }
    return img;
}

inline p4ip::Image random_counts(int w, int h, int max_count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    p4ip::Image img(w, h);
    for (double& v : img.data) {
        v = static_cast<double>(rng() % (max_count + 1));
    }
    return img;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

} // namespace testutil
