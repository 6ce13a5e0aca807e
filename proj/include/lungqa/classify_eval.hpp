#pragma once

#include <optional>
#include <string>
#include <vector>

namespace lungqa {

enum class Label { Normal, Abnormal };

/// Parses "normal"/"abnormal", case-insensitive. Throws on anything else.
Label parse_label(const std::string& s);

/// Counts with abnormal as the positive class.
struct ConfusionMatrix {
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;
    long long tn = 0;

    long long total() const { return tp + fp + fn + tn; }

    bool operator==(const ConfusionMatrix&) const = default;
};

struct MetricsRow {
    double accuracy = 0.0;
    double sensitivity = 0.0;
    double precision = 0.0;
    double f1 = 0.0;

    /// Set when any metric had a zero denominator (reported as 0.0).
    bool zero_denominator = false;
};

ConfusionMatrix confusion(const std::vector<std::pair<Label, Label>>& truth_predicted);

MetricsRow metrics(const ConfusionMatrix& cm);

/// Searches for an integer confusion matrix with tp+fn = n_pos and
/// fp+tn = n_neg whose metrics round to the given row at three decimals.
/// Ties prefer the matrix with the smallest rounding error.
std::optional<ConfusionMatrix> reconstruct_counts(const MetricsRow& row, long long n_pos,
                                                  long long n_neg);

}  // namespace lungqa
