#include "lungqa/overlap.hpp"

#include <stdexcept>

namespace lungqa {

OverlapScores overlap(const BitMask& pred, const BitMask& truth) {
    if (pred.width != truth.width || pred.height != truth.height)
        throw std::invalid_argument("overlap: mask dimensions differ");

    long long inter = 0, np = 0, nt = 0;
    for (std::size_t i = 0; i < pred.bits.size(); ++i) {
        np += pred.bits[i];
        nt += truth.bits[i];
        inter += pred.bits[i] & truth.bits[i];
    }
    const long long uni = np + nt - inter;
    if (np == 0 && nt == 0) return {1.0, 1.0};
    return {static_cast<double>(inter) / static_cast<double>(uni),
            2.0 * static_cast<double>(inter) / static_cast<double>(np + nt)};
}

OverlapScores mean_overlap(const std::vector<OverlapScores>& scores) {
    if (scores.empty()) throw std::invalid_argument("mean_overlap: empty score list");
    OverlapScores m;
    for (const OverlapScores& s : scores) {
        m.iou += s.iou;
        m.dice += s.dice;
    }
    m.iou /= static_cast<double>(scores.size());
    m.dice /= static_cast<double>(scores.size());
    return m;
}

}  // namespace lungqa
