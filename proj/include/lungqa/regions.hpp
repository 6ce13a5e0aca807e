#pragma once

#include <optional>
#include <vector>

#include "lungqa/geometry.hpp"
#include "lungqa/raster.hpp"

namespace lungqa {

enum class Connectivity { Four, Eight };

/// One connected foreground component.
struct Region {
    int label = 0;       // positive id, 1-based
    long long area = 0;  // pixel count
    BoundingBox box;
};

/// Components of one mask, sorted by area descending (ties by label).
struct RegionSet {
    std::vector<Region> regions;
    int source_w = 0;
    int source_h = 0;

    std::size_t count() const { return regions.size(); }
};

/// Area ratios driving the lobe-proportion analysis. Absent with fewer
/// than two regions; such records are flagged degenerate and tallied
/// separately from off-identity observations.
struct RegionRatios {
    std::optional<double> sa_over_lla;  // smallest / largest
    std::optional<double> la_over_lla;  // second-largest / largest
    int region_count = 0;

    bool degenerate() const { return region_count < 2; }
};

/// Labels maximal connected foreground components.
RegionSet label_regions(const BitMask& mask, Connectivity conn = Connectivity::Eight);

RegionRatios ratio_params(const RegionSet& rs);

/// True iff the ratio pair leaves the identity line by more than tau.
/// Callers must not pass degenerate records.
bool off_identity(const RegionRatios& rr, double tau = 0.0);

/// Smallest box containing every region box; absent for an empty set.
std::optional<BoundingBox> union_box(const RegionSet& rs);

}  // namespace lungqa
