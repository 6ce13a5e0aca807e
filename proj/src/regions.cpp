#include "lungqa/regions.hpp"

#include <algorithm>
#include <stdexcept>

namespace lungqa {

RegionSet label_regions(const BitMask& mask, Connectivity conn) {
    RegionSet rs;
    rs.source_w = mask.width;
    rs.source_h = mask.height;

    const int w = mask.width;
    const int h = mask.height;
    std::vector<int> label(static_cast<std::size_t>(w) * h, 0);

    // Neighbor offsets; the first four cover four-connectivity.
    static constexpr int dx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr int dy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    const int n_neighbors = conn == Connectivity::Four ? 4 : 8;

    std::vector<std::pair<int, int>> stack;
    int next_label = 0;

    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            const std::size_t si = static_cast<std::size_t>(sy) * w + sx;
            if (!mask.bits[si] || label[si]) continue;

            ++next_label;
            Region region;
            region.label = next_label;
            region.box = {sx, sy, sx + 1, sy + 1};

            label[si] = next_label;
            stack.clear();
            stack.emplace_back(sx, sy);
            while (!stack.empty()) {
                auto [x, y] = stack.back();
                stack.pop_back();
                ++region.area;
                region.box.x0 = std::min(region.box.x0, x);
                region.box.y0 = std::min(region.box.y0, y);
                region.box.x1 = std::max(region.box.x1, x + 1);
                region.box.y1 = std::max(region.box.y1, y + 1);
                for (int k = 0; k < n_neighbors; ++k) {
                    const int nx = x + dx[k];
                    const int ny = y + dy[k];
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
                    if (mask.bits[ni] && !label[ni]) {
                        label[ni] = next_label;
                        stack.emplace_back(nx, ny);
                    }
                }
            }
            rs.regions.push_back(region);
        }
    }

    std::stable_sort(rs.regions.begin(), rs.regions.end(),
                     [](const Region& a, const Region& b) { return a.area > b.area; });
    return rs;
}

RegionRatios ratio_params(const RegionSet& rs) {
    RegionRatios rr;
    rr.region_count = static_cast<int>(rs.regions.size());
    if (rr.region_count < 2) return rr;

    // regions are sorted by area descending
    const double lla = static_cast<double>(rs.regions.front().area);
    const double la = static_cast<double>(rs.regions[1].area);
    const double sa = static_cast<double>(rs.regions.back().area);
    rr.la_over_lla = la / lla;
    rr.sa_over_lla = sa / lla;
    return rr;
}

bool off_identity(const RegionRatios& rr, double tau) {
    if (rr.degenerate())
        throw std::invalid_argument("off_identity: degenerate record (fewer than two regions)");
    return (*rr.la_over_lla - *rr.sa_over_lla) > tau;
}

std::optional<BoundingBox> union_box(const RegionSet& rs) {
    if (rs.regions.empty()) return std::nullopt;
    BoundingBox u = rs.regions.front().box;
    for (const Region& r : rs.regions) {
        u.x0 = std::min(u.x0, r.box.x0);
        u.y0 = std::min(u.y0, r.box.y0);
        u.x1 = std::max(u.x1, r.box.x1);
        u.y1 = std::max(u.y1, r.box.y1);
    }
    return u;
}

}  // namespace lungqa
