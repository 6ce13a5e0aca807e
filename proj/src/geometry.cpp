#include "lungqa/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lungqa {

Point2 center(const std::optional<BoundingBox>& b) {
    if (!b) return {0.0, 0.0};
    return {(b->x0 + b->x1) / 2.0, (b->y0 + b->y1) / 2.0};
}

Point2 center(const std::optional<BoundingBox>& b, int norm_w, int norm_h) {
    if (norm_w < 1 || norm_h < 1)
        throw std::invalid_argument("center: normalization dimensions must be positive");
    const Point2 c = center(b);
    return {c.x / norm_w, c.y / norm_h};
}

BoundingBox rescale_box(const BoundingBox& b, int seg_w, int seg_h, int orig_w, int orig_h) {
    if (seg_w < 1 || seg_h < 1 || orig_w < 1 || orig_h < 1)
        throw std::invalid_argument("rescale_box: dimensions must be >= 1");
    const double sx = static_cast<double>(orig_w) / seg_w;
    const double sy = static_cast<double>(orig_h) / seg_h;
    BoundingBox out;
    out.x0 = std::clamp(static_cast<int>(std::floor(b.x0 * sx)), 0, orig_w - 1);
    out.y0 = std::clamp(static_cast<int>(std::floor(b.y0 * sy)), 0, orig_h - 1);
    out.x1 = std::clamp(static_cast<int>(std::ceil(b.x1 * sx)), out.x0 + 1, orig_w);
    out.y1 = std::clamp(static_cast<int>(std::ceil(b.y1 * sy)), out.y0 + 1, orig_h);
    return out;
}

BoundingBox expand_box(const BoundingBox& b, double margin, int img_w, int img_h) {
    if (margin < 0.0) throw std::invalid_argument("expand_box: margin must be >= 0");
    const double mx = margin * b.width();
    const double my = margin * b.height();
    BoundingBox out;
    out.x0 = std::clamp(static_cast<int>(std::floor(b.x0 - mx)), 0, img_w - 1);
    out.y0 = std::clamp(static_cast<int>(std::floor(b.y0 - my)), 0, img_h - 1);
    out.x1 = std::clamp(static_cast<int>(std::ceil(b.x1 + mx)), out.x0 + 1, img_w);
    out.y1 = std::clamp(static_cast<int>(std::ceil(b.y1 + my)), out.y0 + 1, img_h);
    return out;
}

Raster crop(const Raster& img, const BoundingBox& b) {
    if (!b.valid() || b.x1 > img.width || b.y1 > img.height)
        throw std::invalid_argument("crop: box degenerate or outside image");
    Raster out(b.width(), b.height());
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            out.at(x, y) = img.at(b.x0 + x, b.y0 + y);
    return out;
}

Raster classifier_prep(const Raster& img, int side) {
    if (side < 1) throw std::invalid_argument("classifier_prep: side must be >= 1");

    const Raster* src = &img;
    Raster padded;
    if (img.width != img.height) {
        const int sq = std::max(img.width, img.height);
        padded = Raster(sq, sq, 0);
        const int off_x = (sq - img.width) / 2;
        const int off_y = (sq - img.height) / 2;
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                padded.at(off_x + x, off_y + y) = img.at(x, y);
        src = &padded;
    }
    return resize(*src, side, side, ResizeMode::Bilinear);
}

}  // namespace lungqa
