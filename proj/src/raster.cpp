#include "lungqa/raster.hpp"

#include <png.h>

#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

namespace lungqa {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& cause) {
    throw RasterIoError(path + ": " + cause);
}

bool has_suffix(const std::string& s, const std::string& suf) {
    if (s.size() < suf.size()) return false;
    for (std::size_t i = 0; i < suf.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[s.size() - suf.size() + i])) != suf[i])
            return false;
    }
    return true;
}

// ---- PGM (P5, maxval <= 255) ----

int pgm_next_int(std::istream& in, const std::string& path) {
    // Skips whitespace and '#' comments between header tokens.
    for (;;) {
        int c = in.peek();
        if (c == EOF) fail(path, "truncated PGM header");
        if (std::isspace(c)) {
            in.get();
        } else if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else {
            break;
        }
    }
    int v = 0;
    if (!(in >> v)) fail(path, "malformed PGM header");
    return v;
}

Raster load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open file");
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '5') fail(path, "not a P5 PGM");
    const int w = pgm_next_int(in, path);
    const int h = pgm_next_int(in, path);
    const int maxval = pgm_next_int(in, path);
    if (w < 1 || h < 1) fail(path, "non-positive PGM dimensions");
    if (maxval < 1 || maxval > 255) fail(path, "unsupported PGM maxval (must be <= 255)");
    in.get();  // single whitespace after maxval
    Raster img(w, h);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
        fail(path, "truncated PGM payload");
    return img;
}

void save_pgm(const Raster& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open file for writing");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) fail(path, "write failed");
}

// ---- PNG via libpng ----

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};

Raster load_png(const std::string& path) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail(path, "cannot open file");

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
        fail(path, "not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(path, "libpng init failed");
    }
    std::vector<png_bytep> rows;
    std::vector<png_byte> data;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "malformed PNG");
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    // Normalize everything to 8-bit RGB or gray; luma conversion is done
    // by hand afterwards so the coefficients stay fixed-point.
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    const int channels = png_get_channels(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);

    data.resize(rowbytes * static_cast<std::size_t>(h));
    rows.resize(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) rows[static_cast<std::size_t>(y)] = data.data() + rowbytes * static_cast<std::size_t>(y);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Raster img(w, h);
    if (channels == 1) {
        for (int y = 0; y < h; ++y)
            std::memcpy(&img.at(0, y), rows[static_cast<std::size_t>(y)], static_cast<std::size_t>(w));
    } else if (channels == 3) {
        for (int y = 0; y < h; ++y) {
            const png_bytep row = rows[static_cast<std::size_t>(y)];
            for (int x = 0; x < w; ++x) {
                const unsigned r = row[3 * x], g = row[3 * x + 1], b = row[3 * x + 2];
                img.at(x, y) = static_cast<std::uint8_t>((77u * r + 150u * g + 29u * b) >> 8);
            }
        }
    } else {
        fail(path, "unsupported PNG channel layout");
    }
    return img;
}

void save_png(const Raster& img, const std::string& path) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail(path, "cannot open file for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail(path, "libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "PNG write failed");
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height),
                 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < img.height; ++y)
        png_write_row(png, const_cast<png_bytep>(&img.pixels[static_cast<std::size_t>(y) * img.width]));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

Raster::Raster(int w, int h, std::uint8_t fill) : width(w), height(h) {
    if (w < 1 || h < 1) throw std::invalid_argument("Raster dimensions must be >= 1");
    pixels.assign(static_cast<std::size_t>(w) * h, fill);
}

BitMask::BitMask(int w, int h, bool fill) : width(w), height(h) {
    if (w < 1 || h < 1) throw std::invalid_argument("BitMask dimensions must be >= 1");
    bits.assign(static_cast<std::size_t>(w) * h, fill ? 1 : 0);
}

std::size_t BitMask::foreground_count() const {
    std::size_t n = 0;
    for (std::uint8_t b : bits) n += b;
    return n;
}

Raster load_gray(const std::string& path) {
    if (has_suffix(path, ".png")) return load_png(path);
    if (has_suffix(path, ".pgm")) return load_pgm(path);
    // Sniff by magic when the extension is unhelpful.
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open file");
    char magic[2] = {0, 0};
    in.read(magic, 2);
    in.close();
    if (magic[0] == 'P' && magic[1] == '5') return load_pgm(path);
    if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P') return load_png(path);
    fail(path, "unsupported format (expected PGM P5 or PNG)");
}

void save_gray(const Raster& img, const std::string& path) {
    if (has_suffix(path, ".png"))
        save_png(img, path);
    else if (has_suffix(path, ".pgm"))
        save_pgm(img, path);
    else
        fail(path, "unsupported output extension (expected .pgm or .png)");
}

BitMask binarize(const Raster& mask, int threshold) {
    BitMask out(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.pixels.size(); ++i)
        out.bits[i] = mask.pixels[i] >= threshold ? 1 : 0;
    return out;
}

Raster resize(const Raster& img, int new_w, int new_h, ResizeMode mode) {
    if (new_w < 1 || new_h < 1) throw std::invalid_argument("resize: target dimensions must be >= 1");
    if (new_w == img.width && new_h == img.height) return img;

    Raster out(new_w, new_h);
    const double sx = static_cast<double>(img.width) / new_w;
    const double sy = static_cast<double>(img.height) / new_h;

    if (mode == ResizeMode::Nearest) {
        for (int y = 0; y < new_h; ++y) {
            int src_y = static_cast<int>((y + 0.5) * sy);
            if (src_y >= img.height) src_y = img.height - 1;
            for (int x = 0; x < new_w; ++x) {
                int src_x = static_cast<int>((x + 0.5) * sx);
                if (src_x >= img.width) src_x = img.width - 1;
                out.at(x, y) = img.at(src_x, src_y);
            }
        }
        return out;
    }

    // Bilinear, edge-clamped, round half up.
    auto clamp = [](double v, int hi) {
        if (v < 0.0) return 0.0;
        if (v > hi) return static_cast<double>(hi);
        return v;
    };
    for (int y = 0; y < new_h; ++y) {
        const double fy = clamp((y + 0.5) * sy - 0.5, img.height - 1);
        const int y0 = static_cast<int>(fy);
        const int y1 = y0 + 1 < img.height ? y0 + 1 : y0;
        const double wy = fy - y0;
        for (int x = 0; x < new_w; ++x) {
            const double fx = clamp((x + 0.5) * sx - 0.5, img.width - 1);
            const int x0 = static_cast<int>(fx);
            const int x1 = x0 + 1 < img.width ? x0 + 1 : x0;
            const double wx = fx - x0;
            const double top = img.at(x0, y0) * (1.0 - wx) + img.at(x1, y0) * wx;
            const double bot = img.at(x0, y1) * (1.0 - wx) + img.at(x1, y1) * wx;
            const double v = top * (1.0 - wy) + bot * wy;
            out.at(x, y) = static_cast<std::uint8_t>(std::floor(v + 0.5));
        }
    }
    return out;
}

}  // namespace lungqa
