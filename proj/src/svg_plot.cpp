#include "lungqa/svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace lungqa {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

void svg_open(std::ostringstream& out, const PlotTransform& t, const std::string& x_label,
              const std::string& y_label) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << t.width << "\" height=\""
        << t.height << "\" viewBox=\"0 0 " << t.width << " " << t.height << "\">\n";
    out << "  <rect width=\"" << t.width << "\" height=\"" << t.height << "\" fill=\"white\"/>\n";
    // frame
    out << "  <rect x=\"" << t.margin << "\" y=\"" << t.margin << "\" width=\""
        << t.width - 2 * t.margin << "\" height=\"" << t.height - 2 * t.margin
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    out << "  <text x=\"" << t.width / 2 << "\" y=\"" << t.height - t.margin / 4
        << "\" text-anchor=\"middle\" font-size=\"14\">" << x_label << "</text>\n";
    out << "  <text x=\"" << t.margin / 4 << "\" y=\"" << t.height / 2
        << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 " << t.margin / 4
        << " " << t.height / 2 << ")\">" << y_label << "</text>\n";
}

void circle(std::ostringstream& out, const PlotTransform& t, double x, double y) {
    out << "    <circle cx=\"" << num(t.sx(x)) << "\" cy=\"" << num(t.sy(y)) << "\" r=\"3\"/>\n";
}

}  // namespace

PlotTransform cbb_transform(const QaReport& report) {
    PlotTransform t;
    if (report.normalized_cbb) return t;  // fixed [0,1] squared

    double xmax = 1.0, ymax = 1.0;
    for (const ImageRecord& r : report.records) {
        if (!r.error.empty()) continue;
        xmax = std::max(xmax, r.cbb.x);
        ymax = std::max(ymax, r.cbb.y);
    }
    t.xmax = xmax;
    t.ymax = ymax;
    return t;
}

PlotTransform ratio_transform() {
    PlotTransform t;
    t.flip_y = true;
    return t;
}

std::string plot_cbb(const QaReport& report) {
    bool any = false;
    for (const ImageRecord& r : report.records) any |= r.error.empty();
    if (!any) throw std::invalid_argument("plot_cbb: no CBB records to plot");

    const PlotTransform t = cbb_transform(report);
    std::ostringstream out;
    svg_open(out, t, "CBB x", "CBB y");
    out << "  <g class=\"inliers\" fill=\"#1f77b4\">\n";
    for (const ImageRecord& r : report.records)
        if (r.error.empty() && !r.outlier) circle(out, t, r.cbb.x, r.cbb.y);
    out << "  </g>\n";
    out << "  <g class=\"outliers\" fill=\"#d62728\">\n";
    for (const ImageRecord& r : report.records)
        if (r.error.empty() && r.outlier) circle(out, t, r.cbb.x, r.cbb.y);
    out << "  </g>\n";
    out << "</svg>\n";
    return out.str();
}

std::string plot_ratio(const QaReport& report) {
    bool any = false;
    for (const ImageRecord& r : report.records) any |= !r.degenerate && r.error.empty();
    if (!any) throw std::invalid_argument("plot_ratio: no ratio records to plot");

    const PlotTransform t = ratio_transform();
    std::ostringstream out;
    svg_open(out, t, "SA/LLA", "LA/LLA");
    out << "  <line class=\"identity\" x1=\"" << num(t.sx(0)) << "\" y1=\"" << num(t.sy(0))
        << "\" x2=\"" << num(t.sx(1)) << "\" y2=\"" << num(t.sy(1))
        << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    out << "  <g class=\"on-identity\" fill=\"#1f77b4\">\n";
    for (const ImageRecord& r : report.records)
        if (r.error.empty() && !r.degenerate && !r.off_identity)
            circle(out, t, *r.sa_over_lla, *r.la_over_lla);
    out << "  </g>\n";
    out << "  <g class=\"off-identity\" fill=\"#d62728\">\n";
    for (const ImageRecord& r : report.records)
        if (r.error.empty() && !r.degenerate && r.off_identity)
            circle(out, t, *r.sa_over_lla, *r.la_over_lla);
    out << "  </g>\n";
    out << "</svg>\n";
    return out.str();
}

}  // namespace lungqa
