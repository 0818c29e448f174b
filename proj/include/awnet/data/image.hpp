#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "awnet/errors.hpp"

namespace awnet {

// Row-major interleaved raster. Channels is 1 or 3 everywhere in this project.
template <typename T>
struct Image {
    int h = 0, w = 0, channels = 1;
    std::vector<T> px;

    Image() = default;
    Image(int h_, int w_, int c_ = 1, T fill = T(0))
        : h(h_), w(w_), channels(c_), px(static_cast<std::size_t>(h_) * w_ * c_, fill) {}

    T& at(int y, int x, int c = 0) { return px[(static_cast<std::size_t>(y) * w + x) * channels + c]; }
    const T& at(int y, int x, int c = 0) const { return px[(static_cast<std::size_t>(y) * w + x) * channels + c]; }
    std::size_t size() const { return px.size(); }
    bool empty() const { return px.empty(); }
};

using ImageU8 = Image<std::uint8_t>;
using ImageF = Image<float>;
using BinaryMask = Image<std::uint8_t>;  // values 0/1

// Decoders: PNG/JPEG/TIFF via the imaging library, GIF via the built-in
// decoder. Always returns 3-channel RGB.
ImageU8 read_image_rgb(const std::filesystem::path& path);

// Reads a mask file and binarises it (>=128 -> 1).
BinaryMask read_binary_mask(const std::filesystem::path& path);

void write_image_rgb(const std::filesystem::path& path, const ImageU8& img);
void write_png_gray8(const std::filesystem::path& path, const ImageF& img01);
void write_png_gray16(const std::filesystem::path& path, const ImageF& img01);
void write_png_mask(const std::filesystem::path& path, const BinaryMask& mask);
ImageF read_png_gray16(const std::filesystem::path& path);

// Minimal GIF87a/89a decoder (first frame, optional interlace, LZW).
ImageU8 decode_gif(const std::vector<std::uint8_t>& bytes);
ImageU8 read_gif(const std::filesystem::path& path);

ImageF mask_to_float(const BinaryMask& m);
BinaryMask float_to_mask(const ImageF& img, float threshold = 0.5f);

}  // namespace awnet
