#include "p4ip/binning.hpp"

#include <algorithm>
#include <cmath>

#include "p4ip/errors.hpp"

namespace p4ip {

Image bin_down(const Image& img, int factor) {
    if (factor < 1) {
        throw data_error("bin_down: factor must be >= 1");
    }
    if (factor == 1) {
        return img;
    }
    if (factor > img.width || factor > img.height) {
        throw data_error("bin_down: factor larger than image dimensions");
    }
    const int out_w = img.width / factor;
    const int out_h = img.height / factor;
    Image out(out_w, out_h);
    for (int r = 0; r < out_h; ++r) {
        for (int c = 0; c < out_w; ++c) {
            double acc = 0.0;
            for (int i = 0; i < factor; ++i) {
                for (int j = 0; j < factor; ++j) {
                    acc += img.at(r * factor + i, c * factor + j);
                }
            }
            out.at(r, c) = acc;
        }
    }
    return out;
}

Image bin_up(const Image& img, int factor, int out_width, int out_height) {
    if (factor < 1) {
        throw data_error("bin_up: factor must be >= 1");
    }
    if (out_width < img.width || out_height < img.height) {
        throw data_error("bin_up: target smaller than input");
    }
    if (factor == 1 && out_width == img.width && out_height == img.height) {
        return img;
    }

    Image out(out_width, out_height);
    const double scale = 1.0 / (static_cast<double>(factor) * factor);
    const double sy = static_cast<double>(img.height) / out_height;
    const double sx = static_cast<double>(img.width) / out_width;
    for (int r = 0; r < out_height; ++r) {
        // Pixel-center mapping, clamped at the borders.
        const double fy = std::clamp((r + 0.5) * sy - 0.5, 0.0, static_cast<double>(img.height - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double wy = fy - y0;
        for (int c = 0; c < out_width; ++c) {
            const double fx =
                std::clamp((c + 0.5) * sx - 0.5, 0.0, static_cast<double>(img.width - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double wx = fx - x0;
            const double top = img.at(y0, x0) * (1.0 - wx) + img.at(y0, x1) * wx;
            const double bot = img.at(y1, x0) * (1.0 - wx) + img.at(y1, x1) * wx;
            out.at(r, c) = (top * (1.0 - wy) + bot * wy) * scale;
        }
    }
    return out;
}

} // namespace p4ip
