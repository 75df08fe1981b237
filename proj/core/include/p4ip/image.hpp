#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace p4ip {

/// Single-channel raster of real values, row-major.
///
/// Carries every image-like quantity in the library: clean scenes,
/// photon counts, restoration iterates and ADMM dual variables. Observed
/// counts and scene intensities are nonnegative; dual variables are not,
/// so nonnegativity is checked at the entry points that require it
/// (file loaders, Poisson sampling, solver inputs) rather than here.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    Image() = default;
    Image(int w, int h, double fill = 0.0);

    std::size_t size() const { return data.size(); }
    double& at(int row, int col) { return data[static_cast<std::size_t>(row) * width + col]; }
    double at(int row, int col) const { return data[static_cast<std::size_t>(row) * width + col]; }
    bool same_dims(const Image& other) const {
        return width == other.width && height == other.height;
    }
};

double max_value(const Image& img);
double min_value(const Image& img);
double sum_value(const Image& img);
double mean_value(const Image& img);

/// Throws data_error if any value is NaN/inf.
void require_finite(const Image& img, const std::string& what);
/// Throws data_error if any value is negative (or non-finite).
void require_nonnegative(const Image& img, const std::string& what);
/// Throws data_error unless both images have identical dimensions.
void require_same_dims(const Image& a, const Image& b, const std::string& what);

/// Deterministic synthetic test scenes (piecewise-constant plateaus).
/// Known names: "blocks", "stripes", "ramp". Values lie in [0, 1].
Image synthetic_scene(const std::string& name, int width, int height);

} // namespace p4ip
