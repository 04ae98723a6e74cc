#include "mcslam/util/image.hpp"

#include <zlib.h>

#include <cstdio>
#include <memory>
#include <stdexcept>

namespace mcslam::util {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_for_write(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    return f;
}

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(std::uint8_t(v >> 24));
    out.push_back(std::uint8_t(v >> 16));
    out.push_back(std::uint8_t(v >> 8));
    out.push_back(std::uint8_t(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char tag[4],
               const std::vector<std::uint8_t>& payload) {
    put_be32(out, std::uint32_t(payload.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), tag, tag + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    const auto crc = std::uint32_t(
        crc32(0, out.data() + crc_start, uInt(out.size() - crc_start)));
    put_be32(out, crc);
}

}  // namespace

GrayImage ternary_to_gray(const grid::TernaryMap& m) {
    GrayImage img(m.width, m.height);
    for (std::size_t i = 0; i < m.values.size(); ++i)
        img.pixels[i] = m.values[i] == 1.0 ? 255 : (m.values[i] == 0.5 ? 128 : 0);
    return img;
}

GrayImage hstack(const std::vector<GrayImage>& tiles, int gap, std::uint8_t gap_value) {
    if (tiles.empty()) throw std::invalid_argument("hstack of nothing");
    const int h = tiles.front().height;
    int w = 0;
    for (const auto& t : tiles) {
        if (t.height != h) throw std::invalid_argument("hstack height mismatch");
        w += t.width;
    }
    w += gap * int(tiles.size() - 1);
    GrayImage out(w, h, gap_value);
    int x0 = 0;
    for (const auto& t : tiles) {
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < t.width; ++c)
                out.pixels[std::size_t(r) * w + x0 + c] =
                    t.pixels[std::size_t(r) * t.width + c];
        x0 += t.width + gap;
    }
    return out;
}

void write_pgm_gray(const std::string& path, const GrayImage& img) {
    FilePtr f = open_for_write(path);
    std::fprintf(f.get(), "P5\n%d %d\n255\n", img.width, img.height);
    if (!img.pixels.empty() &&
        std::fwrite(img.pixels.data(), 1, img.pixels.size(), f.get()) != img.pixels.size())
        throw std::runtime_error("short write to " + path);
}

void write_png_gray(const std::string& path, const GrayImage& img) {
    /* filter byte 0 before every scanline */
    std::vector<std::uint8_t> raw;
    raw.reserve(std::size_t(img.height) * (std::size_t(img.width) + 1));
    for (int r = 0; r < img.height; ++r) {
        raw.push_back(0);
        raw.insert(raw.end(), img.pixels.begin() + std::ptrdiff_t(r) * img.width,
                   img.pixels.begin() + std::ptrdiff_t(r + 1) * img.width);
    }

    uLongf bound = compressBound(uLong(raw.size()));
    std::vector<std::uint8_t> deflated(bound);
    if (compress2(deflated.data(), &bound, raw.data(), uLong(raw.size()),
                  Z_BEST_COMPRESSION) != Z_OK)
        throw std::runtime_error("zlib compression failed for " + path);
    deflated.resize(bound);

    std::vector<std::uint8_t> out;
    const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    out.insert(out.end(), sig, sig + 8);

    std::vector<std::uint8_t> ihdr;
    put_be32(ihdr, std::uint32_t(img.width));
    put_be32(ihdr, std::uint32_t(img.height));
    ihdr.push_back(8);   /* bit depth */
    ihdr.push_back(0);   /* grayscale */
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    put_chunk(out, "IHDR", ihdr);
    put_chunk(out, "IDAT", deflated);
    put_chunk(out, "IEND", {});

    FilePtr f = open_for_write(path);
    if (std::fwrite(out.data(), 1, out.size(), f.get()) != out.size())
        throw std::runtime_error("short write to " + path);
}

}  // namespace mcslam::util
