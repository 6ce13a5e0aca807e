#pragma once

#include <vector>

#include "lungqa/raster.hpp"

namespace lungqa {

struct OverlapScores {
    double iou = 0.0;
    double dice = 0.0;
};

/// IoU and Dice between two same-sized masks, from exact pixel counts.
/// Two empty masks score 1.0 on both; one empty mask scores 0.0.
OverlapScores overlap(const BitMask& pred, const BitMask& truth);

/// Arithmetic mean of per-pair scores.
OverlapScores mean_overlap(const std::vector<OverlapScores>& scores);

}  // namespace lungqa
