// Minimal out-of-process denoiser used by bridge tests and as a working
// example of the external denoiser protocol.
// Usage: denoiser_tool <mode> <input.raster> <sigma> <output.raster>
// Modes: copy | gauss | baddims | fail | slow
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <thread>

#include "p4ip/denoisers.hpp"
#include "p4ip/raster_io.hpp"

int main(int argc, char** argv) {
    if (argc != 5) {
        std::cerr << "usage: denoiser_tool <copy|gauss|baddims|fail|slow> <in> <sigma> <out>\n";
        return 2;
    }
    const std::string mode = argv[1];
    const std::string in_path = argv[2];
    const double sigma = std::atof(argv[3]);
    const std::string out_path = argv[4];

    try {
        if (mode == "fail") {
            return 3;
        }
        if (mode == "slow") {
            std::this_thread::sleep_for(std::chrono::seconds(5));
        }
        const p4ip::Image img = p4ip::load_raster(in_path);
        if (mode == "baddims") {
            p4ip::save_raster(p4ip::Image(1, 1, 0.0), out_path);
            return 0;
        }
        if (mode == "gauss") {
            p4ip::save_raster(p4ip::gaussian_filter_denoiser()(img, sigma), out_path);
            return 0;
        }
        p4ip::save_raster(img, out_path); // copy / slow
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "denoiser_tool: " << e.what() << "\n";
        return 4;
    }
}
