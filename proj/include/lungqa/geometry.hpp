#pragma once

#include <optional>

#include "lungqa/raster.hpp"

namespace lungqa {

/// Axis-aligned pixel box, half-open: [x0, x1) x [y0, y1).
struct BoundingBox {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    bool valid() const { return x0 >= 0 && y0 >= 0 && x0 < x1 && y0 < y1; }

    bool contains(const BoundingBox& other) const {
        return x0 <= other.x0 && y0 <= other.y0 && x1 >= other.x1 && y1 >= other.y1;
    }

    bool operator==(const BoundingBox&) const = default;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2&) const = default;
};

/// Midpoint of the box, optionally normalized by image dimensions.
/// An absent box maps to the origin.
Point2 center(const std::optional<BoundingBox>& b);
Point2 center(const std::optional<BoundingBox>& b, int norm_w, int norm_h);

/// Maps a box from segmentation resolution to original resolution.
/// Mins are floor-rounded and maxes ceil-rounded so the mapped box never
/// loses coverage; the result is clamped to the original bounds.
BoundingBox rescale_box(const BoundingBox& b, int seg_w, int seg_h, int orig_w, int orig_h);

/// Expands each side of the box by margin * side length (floor for mins,
/// ceil for maxes), then clamps to the image bounds.
BoundingBox expand_box(const BoundingBox& b, double margin, int img_w, int img_h);

/// Copies the sub-image covered by the box. The box must lie within img.
Raster crop(const Raster& img, const BoundingBox& b);

/// Pads the shorter axis symmetrically with zeros to a square, then
/// bilinear-resizes to side x side. Odd pad differences put the extra
/// pixel on the right/bottom.
Raster classifier_prep(const Raster& img, int side = 224);

}  // namespace lungqa
