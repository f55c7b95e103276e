#ifndef CREASE_IMAGE_IO_HPP
#define CREASE_IMAGE_IO_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "crease/field.hpp"

namespace crease {

/// Reads PGM (P2/P5), grayscale PNG, or an SF2D float stream; the format is
/// sniffed from the file header. PGM/PNG intensities are normalized to [0,1].
ScalarField2D read_image(const std::string& path);

/// Writes by extension: .pgm (P5), .png (8-bit gray; values clamped to [0,1]
/// and quantized), .sf2d (raw float32 stream, lossless up to float32).
void write_image(const ScalarField2D& u, const std::string& path);

/// SF2D stream: 16-byte header (magic "SF2D", u32 LE width, u32 LE height,
/// 4 pad bytes), then width*height little-endian float32, row-major.
void write_sf2d(const ScalarField2D& u, const std::string& path);
ScalarField2D read_sf2d(const std::string& path);

void write_pgm(const ScalarField2D& u, const std::string& path, int maxval = 255);
void write_png_gray(const ScalarField2D& u, const std::string& path);

/// 8-bit RGB image for overlays and colormapped exports.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data; // 3 bytes per pixel, row-major

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}
    void set(int x, int y, std::array<std::uint8_t, 3> rgb) {
        std::size_t o = (static_cast<std::size_t>(y) * width + x) * 3;
        data[o] = rgb[0];
        data[o + 1] = rgb[1];
        data[o + 2] = rgb[2];
    }
};

void write_png_rgb(const RgbImage& img, const std::string& path);

/// Grayscale base expanded to RGB.
RgbImage to_rgb(const ScalarField2D& u);

/// Field rendered through a blue-cyan-yellow-red gradient between the field's
/// min and max (or the given range).
void write_png_colormapped(const ScalarField2D& u, const std::string& path);
void write_png_colormapped(const ScalarField2D& u, const std::string& path, double vmin, double vmax);

} // namespace crease

#endif
