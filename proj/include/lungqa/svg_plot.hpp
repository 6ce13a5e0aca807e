#pragma once

#include <string>

#include "lungqa/report.hpp"

namespace lungqa {

/// Linear data-to-canvas mapping used by both plots. Data x maps left to
/// right; data y maps top to bottom when flip_y is false (image
/// coordinates) and bottom to top when true (ratio plot).
struct PlotTransform {
    double xmin = 0.0, xmax = 1.0;
    double ymin = 0.0, ymax = 1.0;
    int width = 640, height = 640, margin = 60;
    bool flip_y = false;

    double sx(double x) const {
        return margin + (x - xmin) / (xmax - xmin) * (width - 2.0 * margin);
    }
    double sy(double y) const {
        const double t = (y - ymin) / (ymax - ymin);
        return flip_y ? height - margin - t * (height - 2.0 * margin)
                      : margin + t * (height - 2.0 * margin);
    }
};

/// Transform for the CBB scatter: [0,1] squared when the report holds
/// normalized centers, otherwise the tight bounds of the centers
/// (including the origin, where zero-region images land).
PlotTransform cbb_transform(const QaReport& report);

/// Fixed [0,1] squared, y up.
PlotTransform ratio_transform();

/// CBB scatter; inliers and outliers as two circle series.
std::string plot_cbb(const QaReport& report);

/// LA/LLA against SA/LLA with the identity line; on-identity and
/// off-identity points as two circle series. Degenerate records are
/// omitted (they carry no ratios).
std::string plot_ratio(const QaReport& report);

}  // namespace lungqa
