#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lungqa {

/// Raised when the data cannot support a nonsingular scatter estimate.
class DegenerateDataError : public std::runtime_error {
public:
    explicit DegenerateDataError(const std::string& what) : std::runtime_error(what) {}
};

struct McdOptions {
    int h = -1;                 // support size; < 0 means floor((n+d+1)/2)
    std::uint64_t seed = 0;
    int n_starts = 500;
    double cutoff_p = 0.975;

    /// Optional C-step determinant trace: (candidate, step, det).
    /// Within one candidate the determinant is non-increasing.
    std::function<void(int, int, double)> trace;
};

/// Robust location/scatter estimate over an n x d observation matrix.
struct McdFit {
    int n = 0;
    int d = 0;
    int h = 0;

    Eigen::VectorXd raw_location;   // mean of the support
    Eigen::MatrixXd raw_scatter;    // support covariance, consistency-scaled
    double raw_det = 0.0;           // determinant of the plain support covariance
    std::vector<int> support;       // sorted indices, size h

    Eigen::VectorXd location;       // reweighted estimates
    Eigen::MatrixXd scatter;
    std::vector<double> distances;  // robust (Mahalanobis) distances, size n
    std::vector<bool> outlier;      // distances[i] > cutoff
    double cutoff = 0.0;            // sqrt(chi2_quantile(d, cutoff_p))
};

/// FAST-MCD: random (d+1)-element starts extended until nonsingular, two
/// C-steps each, the 10 best kept and iterated to convergence. The support
/// returned is a C-step fixed point. Deterministic for a fixed seed;
/// candidate merging is ordered by (determinant, lexicographic support).
McdFit mcd_fit(const Eigen::MatrixXd& points, const McdOptions& opt = {});

/// Exact reference: enumerates every h-subset and keeps the globally
/// minimal covariance determinant, ties broken by lexicographically
/// smallest index set. Refuses instances with C(n,h) above the bound.
McdFit mcd_exhaustive(const Eigen::MatrixXd& points, int h,
                      std::uint64_t combination_bound = 100000, double cutoff_p = 0.975);

/// Chi-square quantile. Exact closed form -2 ln(1-p) for d = 2; other
/// dimensions via incomplete-gamma inversion (bisection, well under 1e-3).
double chi2_quantile(int d, double p);

/// Outliers per class label, aligned with fit.outlier.
struct ClassOutlierCount {
    std::string label;
    long long outliers = 0;
    long long total = 0;
};

std::vector<ClassOutlierCount> count_outliers_by_class(const McdFit& fit,
                                                       const std::vector<std::string>& labels);

/// Formats count/total as a percentage with one decimal, round half up:
/// format_percent(374, 6428) == "5.8%".
std::string format_percent(long long count, long long total);

}  // namespace lungqa
