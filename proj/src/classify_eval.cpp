#include "lungqa/classify_eval.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace lungqa {

namespace {

double round3(double v) { return std::floor(v * 1000.0 + 0.5) / 1000.0; }

double safe_ratio(long long num, long long den, bool& flagged) {
    if (den == 0) {
        flagged = true;
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Label parse_label(const std::string& s) {
    std::string lower;
    lower.reserve(s.size());
    for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "normal") return Label::Normal;
    if (lower == "abnormal") return Label::Abnormal;
    throw std::invalid_argument("unknown class label: '" + s + "'");
}

ConfusionMatrix confusion(const std::vector<std::pair<Label, Label>>& truth_predicted) {
    if (truth_predicted.empty()) throw std::invalid_argument("confusion: empty prediction list");
    ConfusionMatrix cm;
    for (const auto& [truth, predicted] : truth_predicted) {
        const bool t = truth == Label::Abnormal;
        const bool p = predicted == Label::Abnormal;
        if (t && p)
            ++cm.tp;
        else if (!t && p)
            ++cm.fp;
        else if (t && !p)
            ++cm.fn;
        else
            ++cm.tn;
    }
    return cm;
}

MetricsRow metrics(const ConfusionMatrix& cm) {
    if (cm.total() <= 0) throw std::invalid_argument("metrics: empty confusion matrix");
    MetricsRow row;
    row.accuracy = safe_ratio(cm.tp + cm.tn, cm.total(), row.zero_denominator);
    row.sensitivity = safe_ratio(cm.tp, cm.tp + cm.fn, row.zero_denominator);
    row.precision = safe_ratio(cm.tp, cm.tp + cm.fp, row.zero_denominator);
    const double denom = row.precision + row.sensitivity;
    if (denom == 0.0) {
        row.zero_denominator = true;
        row.f1 = 0.0;
    } else {
        row.f1 = 2.0 * row.precision * row.sensitivity / denom;
    }
    return row;
}

std::optional<ConfusionMatrix> reconstruct_counts(const MetricsRow& row, long long n_pos,
                                                  long long n_neg) {
    if (n_pos <= 0 || n_neg <= 0)
        throw std::invalid_argument("reconstruct_counts: class sizes must be positive");

    std::optional<ConfusionMatrix> best;
    double best_err = std::numeric_limits<double>::infinity();

    for (long long tp = 0; tp <= n_pos; ++tp) {
        for (long long fp = 0; fp <= n_neg; ++fp) {
            const ConfusionMatrix cm{tp, fp, n_pos - tp, n_neg - fp};
            const MetricsRow m = metrics(cm);
            if (round3(m.accuracy) != round3(row.accuracy) ||
                round3(m.sensitivity) != round3(row.sensitivity) ||
                round3(m.precision) != round3(row.precision) || round3(m.f1) != round3(row.f1))
                continue;
            const double err = std::fabs(m.accuracy - row.accuracy) +
                               std::fabs(m.sensitivity - row.sensitivity) +
                               std::fabs(m.precision - row.precision) + std::fabs(m.f1 - row.f1);
            if (err < best_err) {
                best_err = err;
                best = cm;
            }
        }
    }
    return best;
}

}  // namespace lungqa
