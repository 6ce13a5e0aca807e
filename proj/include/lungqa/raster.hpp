#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lungqa {

/// Error raised for unreadable, malformed, or unsupported image files.
/// The message always carries the offending path and the cause.
class RasterIoError : public std::runtime_error {
public:
    explicit RasterIoError(const std::string& what) : std::runtime_error(what) {}
};

/// 2-D 8-bit grayscale image, row-major.
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // size == width * height

    Raster() = default;
    Raster(int w, int h, std::uint8_t fill = 0);

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

    bool operator==(const Raster&) const = default;
};

/// Row-major boolean foreground mask.
struct BitMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // 0/1, size == width * height

    BitMask() = default;
    BitMask(int w, int h, bool fill = false);

    bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }

    std::size_t foreground_count() const;

    bool operator==(const BitMask&) const = default;
};

enum class ResizeMode { Nearest, Bilinear };

/// Loads a PGM (P5, maxval 255) or PNG file as 8-bit grayscale.
/// Colour PNGs are converted with integer luma (77R + 150G + 29B) >> 8.
Raster load_gray(const std::string& path);

/// Saves as PGM P5 or 8-bit gray PNG depending on the file extension
/// (.pgm vs .png). Round-trips bit-exactly with load_gray.
void save_gray(const Raster& img, const std::string& path);

/// Foreground iff pixel >= threshold.
BitMask binarize(const Raster& mask, int threshold = 128);

/// Resizes to new_w x new_h. Nearest for masks, bilinear for images.
/// Bilinear uses edge-clamped sampling and rounds half up to integer.
Raster resize(const Raster& img, int new_w, int new_h, ResizeMode mode);

}  // namespace lungqa
