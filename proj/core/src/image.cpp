#include "p4ip/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "p4ip/errors.hpp"

namespace p4ip {

Image::Image(int w, int h, double fill)
    : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {
    if (w <= 0 || h <= 0) {
        throw data_error("image dimensions must be positive, got " + std::to_string(w) + "x" +
                         std::to_string(h));
    }
}

double max_value(const Image& img) {
    return *std::max_element(img.data.begin(), img.data.end());
}

double min_value(const Image& img) {
    return *std::min_element(img.data.begin(), img.data.end());
}

double sum_value(const Image& img) {
    return std::accumulate(img.data.begin(), img.data.end(), 0.0);
}

double mean_value(const Image& img) {
    return sum_value(img) / static_cast<double>(img.size());
}

void require_finite(const Image& img, const std::string& what) {
    for (double v : img.data) {
        if (!std::isfinite(v)) {
            throw data_error(what + ": non-finite pixel value");
        }
    }
}

void require_nonnegative(const Image& img, const std::string& what) {
    for (double v : img.data) {
        if (!(v >= 0.0)) {
            throw data_error(what + ": negative or non-finite pixel value");
        }
    }
}

void require_same_dims(const Image& a, const Image& b, const std::string& what) {
    if (!a.same_dims(b)) {
        throw data_error(what + ": dimension mismatch " + std::to_string(a.width) + "x" +
                         std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                         std::to_string(b.height));
    }
}

namespace {

void fill_rect(Image& img, int r0, int c0, int r1, int c1, double v) {
    r0 = std::max(r0, 0);
    c0 = std::max(c0, 0);
    r1 = std::min(r1, img.height);
    c1 = std::min(c1, img.width);
    for (int r = r0; r < r1; ++r) {
        for (int c = c0; c < c1; ++c) {
            img.at(r, c) = v;
        }
    }
}

// Plateaus of distinct intensities: rectangles, a disk and a bar. Good
// subject for patch-based denoisers and for binning experiments.
Image blocks_scene(int w, int h) {
    Image img(w, h, 0.12);
    fill_rect(img, h / 8, w / 8, h / 2, w / 2, 0.45);
    fill_rect(img, h / 4, w / 4, (3 * h) / 8, (3 * w) / 8, 0.95);
    fill_rect(img, (5 * h) / 8, w / 16, (7 * h) / 8, (5 * w) / 16, 0.30);
    fill_rect(img, h / 16, (5 * w) / 8, h / 4, (15 * w) / 16, 1.00);
    const double cy = 0.68 * h, cx = 0.70 * w, rad = 0.16 * std::min(w, h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const double dy = r - cy, dx = c - cx;
            if (dy * dy + dx * dx <= rad * rad) {
                img.at(r, c) = 0.70;
            }
        }
    }
    return img;
}

Image stripes_scene(int w, int h) {
    Image img(w, h, 0.10);
    const int period = std::max(4, w / 8);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if ((c / (period / 2)) % 2 == 0) {
                img.at(r, c) = 0.85;
            }
        }
    }
    return img;
}

Image ramp_scene(int w, int h) {
    Image img(w, h, 0.0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            img.at(r, c) = (w > 1) ? static_cast<double>(c) / (w - 1) : 0.0;
        }
    }
    return img;
}

} // namespace

Image synthetic_scene(const std::string& name, int width, int height) {
    if (width <= 0 || height <= 0) {
        throw data_error("synthetic scene dimensions must be positive");
    }
    if (name == "blocks") return blocks_scene(width, height);
    if (name == "stripes") return stripes_scene(width, height);
    if (name == "ramp") return ramp_scene(width, height);
    throw data_error("unknown synthetic scene '" + name + "' (expected blocks|stripes|ramp)");
}

} // namespace p4ip
