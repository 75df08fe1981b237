#include "p4ip/raster_io.hpp"

#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

#include "p4ip/errors.hpp"

namespace p4ip {

namespace {

void put_u32_le(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32_le(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64_le(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) {
        b[i] = static_cast<unsigned char>(bits >> (8 * i));
    }
    out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64_le(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
        bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    }
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

} // namespace

void save_raster(const Image& img, const std::string& path) {
    if (img.width <= 0 || img.height <= 0 ||
        img.data.size() != static_cast<std::size_t>(img.width) * img.height) {
        throw data_error("save_raster: invalid image");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw data_error("save_raster: cannot open '" + path + "' for writing");
    }
    out.write(kRasterMagic, 8);
    put_u32_le(out, static_cast<std::uint32_t>(img.width));
    put_u32_le(out, static_cast<std::uint32_t>(img.height));
    for (double v : img.data) {
        put_f64_le(out, v);
    }
    if (!out) {
        throw data_error("save_raster: write failed for '" + path + "'");
    }
}

Image load_raster(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw data_error("load_raster: cannot open '" + path + "'");
    }
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kRasterMagic, 8) != 0) {
        throw data_error("load_raster: '" + path + "' has wrong magic");
    }
    const std::uint32_t w = get_u32_le(in);
    const std::uint32_t h = get_u32_le(in);
    if (!in || w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20)) {
        throw data_error("load_raster: '" + path + "' has invalid dimensions");
    }
    Image img(static_cast<int>(w), static_cast<int>(h));
    for (double& v : img.data) {
        v = get_f64_le(in);
    }
    if (!in) {
        throw data_error("load_raster: '" + path + "' is truncated");
    }
    return img;
}

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_pgm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

long parse_pgm_int(const std::string& tok, const char* field) {
    if (tok.empty()) {
        throw data_error(std::string("load_pgm: missing ") + field);
    }
    for (char ch : tok) {
        if (!std::isdigit(static_cast<unsigned char>(ch))) {
            throw data_error(std::string("load_pgm: malformed ") + field + " '" + tok + "'");
        }
    }
    return std::stol(tok);
}

} // namespace

Image load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw data_error("load_pgm: cannot open '" + path + "'");
    }
    const std::string magic = next_pgm_token(in);
    if (magic != "P5" && magic != "P2") {
        throw data_error("load_pgm: '" + path + "' is not a PGM (magic '" + magic + "')");
    }
    const long w = parse_pgm_int(next_pgm_token(in), "width");
    const long h = parse_pgm_int(next_pgm_token(in), "height");
    const long maxval = parse_pgm_int(next_pgm_token(in), "maxval");
    if (w <= 0 || h <= 0) {
        throw data_error("load_pgm: '" + path + "' has degenerate dimensions");
    }
    if (maxval <= 0 || maxval > 65535) {
        throw data_error("load_pgm: '" + path + "' has maxval out of range");
    }

    Image img(static_cast<int>(w), static_cast<int>(h));
    if (magic == "P2") {
        for (double& v : img.data) {
            long s;
            if (!(in >> s) || s < 0 || s > maxval) {
                throw data_error("load_pgm: '" + path + "' has a bad or missing ASCII sample");
            }
            v = static_cast<double>(s);
        }
    } else {
        // The single whitespace byte after maxval was consumed by the tokenizer.
        const bool two_bytes = maxval > 255;
        for (double& v : img.data) {
            int hi = in.get();
            if (hi == EOF) {
                throw data_error("load_pgm: '" + path + "' payload is truncated");
            }
            if (two_bytes) {
                int lo = in.get();
                if (lo == EOF) {
                    throw data_error("load_pgm: '" + path + "' payload is truncated");
                }
                v = static_cast<double>((hi << 8) | lo); // 16-bit samples are MSB first
            } else {
                v = static_cast<double>(hi);
            }
        }
    }
    return img;
}

} // namespace p4ip
