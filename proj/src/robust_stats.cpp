#include "lungqa/robust_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

namespace lungqa {

namespace {

constexpr double kSingularDet = 1e-300;
constexpr double kConvergenceTol = 1e-12;
constexpr int kKeepBest = 10;

// ---- chi-square quantile machinery ----

// Regularized lower incomplete gamma P(a, x), series + continued fraction.
double gamma_p(double a, double x) {
    if (x <= 0.0) return 0.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        // series representation
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    // continued fraction for Q(a, x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double dd = 1.0 / b;
    double frac = dd;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        dd = an * dd + b;
        if (std::fabs(dd) < tiny) dd = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        dd = 1.0 / dd;
        const double delta = dd * c;
        frac *= delta;
        if (std::fabs(delta - 1.0) < 1e-15) break;
    }
    const double q = std::exp(-x + a * std::log(x) - gln) * frac;
    return 1.0 - q;
}

// ---- covariance over a support ----

struct SupportEstimate {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;  // denominator |support| - 1
    double det = 0.0;
};

SupportEstimate estimate(const Eigen::MatrixXd& points, const std::vector<int>& support) {
    const int d = static_cast<int>(points.cols());
    const int m = static_cast<int>(support.size());
    SupportEstimate e;
    e.mean = Eigen::VectorXd::Zero(d);
    for (int idx : support) e.mean += points.row(idx).transpose();
    e.mean /= m;
    e.cov = Eigen::MatrixXd::Zero(d, d);
    for (int idx : support) {
        const Eigen::VectorXd c = points.row(idx).transpose() - e.mean;
        e.cov.noalias() += c * c.transpose();
    }
    e.cov /= (m - 1);
    e.det = e.cov.determinant();
    return e;
}

std::vector<double> squared_distances(const Eigen::MatrixXd& points, const Eigen::VectorXd& mean,
                                      const Eigen::MatrixXd& cov) {
    const Eigen::MatrixXd inv = cov.inverse();
    std::vector<double> d2(static_cast<std::size_t>(points.rows()));
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const Eigen::VectorXd c = points.row(i).transpose() - mean;
        d2[static_cast<std::size_t>(i)] = c.dot(inv * c);
    }
    return d2;
}

// h indices with smallest squared distance, ties by index; returned sorted.
std::vector<int> smallest_h(const std::vector<double>& d2, int h) {
    std::vector<int> order(d2.size());
    std::iota(order.begin(), order.end(), 0);
    std::nth_element(order.begin(), order.begin() + h, order.end(), [&](int a, int b) {
        if (d2[static_cast<std::size_t>(a)] != d2[static_cast<std::size_t>(b)])
            return d2[static_cast<std::size_t>(a)] < d2[static_cast<std::size_t>(b)];
        return a < b;
    });
    order.resize(static_cast<std::size_t>(h));
    std::sort(order.begin(), order.end());
    return order;
}

bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct Candidate {
    std::vector<int> support;  // sorted
    double det = std::numeric_limits<double>::infinity();

    bool better_than(const Candidate& other) const {
        if (det != other.det) return det < other.det;
        return lex_less(support, other.support);
    }
};

double median_of(std::vector<double> v) {
    const std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
    double hi = v[m];
    if (v.size() % 2 == 0) {
        const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m));
        return (lo + hi) / 2.0;
    }
    return hi;
}

// Shared tail: given the final support, build the full fit (consistency
// scaling, reweighting, robust distances, flags).
McdFit finish(const Eigen::MatrixXd& points, std::vector<int> support, double cutoff_p) {
    const int n = static_cast<int>(points.rows());
    const int d = static_cast<int>(points.cols());

    McdFit fit;
    fit.n = n;
    fit.d = d;
    fit.h = static_cast<int>(support.size());
    std::sort(support.begin(), support.end());

    const SupportEstimate raw = estimate(points, support);
    if (!(raw.det > kSingularDet))
        throw DegenerateDataError("mcd: support covariance is singular (degenerate data)");

    fit.raw_location = raw.mean;
    fit.raw_det = raw.det;
    fit.support = std::move(support);

    // Consistency factor: median of all squared distances under the raw
    // estimate, over the chi-square median.
    const std::vector<double> d2_raw = squared_distances(points, raw.mean, raw.cov);
    const double factor = median_of(d2_raw) / chi2_quantile(d, 0.5);
    fit.raw_scatter = raw.cov * factor;

    // Reweighting at the 0.975 cutoff.
    const double reweight_cut = chi2_quantile(d, 0.975);
    std::vector<int> kept;
    for (int i = 0; i < n; ++i)
        if (d2_raw[static_cast<std::size_t>(i)] / factor <= reweight_cut) kept.push_back(i);
    if (static_cast<int>(kept.size()) <= d)
        throw DegenerateDataError("mcd: reweighting kept too few observations");
    const SupportEstimate rw = estimate(points, kept);
    if (!(rw.det > kSingularDet))
        throw DegenerateDataError("mcd: reweighted scatter is singular (degenerate data)");
    fit.location = rw.mean;
    fit.scatter = rw.cov;

    const std::vector<double> d2 = squared_distances(points, rw.mean, rw.cov);
    fit.cutoff = std::sqrt(chi2_quantile(d, cutoff_p));
    fit.distances.resize(static_cast<std::size_t>(n));
    fit.outlier.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        fit.distances[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, d2[static_cast<std::size_t>(i)]));
        fit.outlier[static_cast<std::size_t>(i)] = fit.distances[static_cast<std::size_t>(i)] > fit.cutoff;
    }
    return fit;
}

void validate_inputs(const Eigen::MatrixXd& points, int h) {
    const int n = static_cast<int>(points.rows());
    const int d = static_cast<int>(points.cols());
    if (d < 1) throw std::invalid_argument("mcd: dimension must be >= 1");
    if (n < d + 2) throw std::invalid_argument("mcd: need at least d+2 observations");
    if (2 * h <= n || h > n) throw std::invalid_argument("mcd: h must satisfy n/2 < h <= n");
}

}  // namespace

double chi2_quantile(int d, double p) {
    if (d < 1) throw std::invalid_argument("chi2_quantile: d must be >= 1");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("chi2_quantile: p must be in (0,1)");
    if (d == 2) return -2.0 * std::log1p(-p);

    // Invert P(d/2, x/2) = p by bisection.
    const double a = d / 2.0;
    double lo = 0.0;
    double hi = 1.0;
    while (gamma_p(a, hi / 2.0) < p) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (gamma_p(a, mid / 2.0) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

McdFit mcd_fit(const Eigen::MatrixXd& points, const McdOptions& opt) {
    const int n = static_cast<int>(points.rows());
    const int d = static_cast<int>(points.cols());
    const int h = opt.h < 0 ? (n + d + 1) / 2 : opt.h;
    validate_inputs(points, h);

    if (h == n) {
        std::vector<int> all(static_cast<std::size_t>(n));
        std::iota(all.begin(), all.end(), 0);
        return finish(points, std::move(all), opt.cutoff_p);
    }

    std::mt19937_64 rng(opt.seed);
    auto draw = [&](int bound) { return static_cast<int>(rng() % static_cast<std::uint64_t>(bound)); };

    // One C-step: h nearest points under the current estimate.
    auto c_step = [&](const SupportEstimate& e) {
        return smallest_h(squared_distances(points, e.mean, e.cov), h);
    };

    std::vector<Candidate> best;
    std::vector<int> pool(static_cast<std::size_t>(n));

    for (int start = 0; start < opt.n_starts; ++start) {
        // Random (d+1)-subset, extended while the covariance is singular.
        std::iota(pool.begin(), pool.end(), 0);
        int taken = 0;
        auto take_one = [&]() {
            const int j = taken + draw(n - taken);
            std::swap(pool[static_cast<std::size_t>(taken)], pool[static_cast<std::size_t>(j)]);
            ++taken;
        };
        for (int i = 0; i < d + 1; ++i) take_one();

        std::vector<int> subset(pool.begin(), pool.begin() + taken);
        std::sort(subset.begin(), subset.end());
        SupportEstimate e = estimate(points, subset);
        while (!(e.det > kSingularDet) && taken < n) {
            take_one();
            subset.assign(pool.begin(), pool.begin() + taken);
            std::sort(subset.begin(), subset.end());
            e = estimate(points, subset);
        }
        if (!(e.det > kSingularDet))
            throw DegenerateDataError("mcd: all observations lie on a lower-dimensional subspace");

        // Two concentration steps.
        Candidate cand;
        for (int step = 0; step < 2; ++step) {
            cand.support = c_step(e);
            e = estimate(points, cand.support);
            if (opt.trace) opt.trace(start, step, e.det);
            if (!(e.det > kSingularDet)) break;
        }
        cand.det = e.det;

        if (static_cast<int>(best.size()) < kKeepBest) {
            best.push_back(std::move(cand));
            std::sort(best.begin(), best.end(),
                      [](const Candidate& a, const Candidate& b) { return a.better_than(b); });
        } else if (cand.better_than(best.back())) {
            best.back() = std::move(cand);
            std::sort(best.begin(), best.end(),
                      [](const Candidate& a, const Candidate& b) { return a.better_than(b); });
        }
    }

    // Iterate the kept candidates to convergence.
    Candidate winner;
    for (std::size_t ci = 0; ci < best.size(); ++ci) {
        Candidate cand = best[ci];
        if (!(cand.det > kSingularDet))
            throw DegenerateDataError("mcd: singular scatter during concentration (degenerate data)");
        SupportEstimate e = estimate(points, cand.support);
        for (int step = 2; step < 1000; ++step) {
            std::vector<int> next = smallest_h(squared_distances(points, e.mean, e.cov), h);
            const SupportEstimate ne = estimate(points, next);
            if (opt.trace) opt.trace(opt.n_starts + static_cast<int>(ci), step, ne.det);
            if (!(ne.det > kSingularDet))
                throw DegenerateDataError("mcd: singular scatter during concentration (degenerate data)");
            const bool same_support = next == cand.support;
            cand.support = std::move(next);
            cand.det = ne.det;
            if (same_support || std::fabs(e.det - ne.det) <= kConvergenceTol * e.det) break;
            e = ne;
        }
        if (cand.better_than(winner)) winner = std::move(cand);
    }

    if (winner.support.empty())
        throw DegenerateDataError("mcd: no nonsingular candidate found");
    return finish(points, std::move(winner.support), opt.cutoff_p);
}

McdFit mcd_exhaustive(const Eigen::MatrixXd& points, int h, std::uint64_t combination_bound,
                      double cutoff_p) {
    const int n = static_cast<int>(points.rows());
    validate_inputs(points, h);

    // C(n, h) with overflow guard against the bound.
    std::uint64_t combos = 1;
    for (int i = 1; i <= h; ++i) {
        combos = combos * static_cast<std::uint64_t>(n - h + i) / static_cast<std::uint64_t>(i);
        if (combos > combination_bound)
            throw std::invalid_argument("mcd_exhaustive: C(n,h) exceeds the combination bound");
    }

    std::vector<int> comb(static_cast<std::size_t>(h));
    std::iota(comb.begin(), comb.end(), 0);

    std::vector<int> best_support;
    double best_det = std::numeric_limits<double>::infinity();

    // Lexicographic enumeration; strict improvement keeps the first (and
    // therefore lexicographically smallest) support on ties.
    for (;;) {
        const double det = estimate(points, comb).det;
        if (det < best_det) {
            best_det = det;
            best_support = comb;
        }
        int i = h - 1;
        while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - h + i) --i;
        if (i < 0) break;
        ++comb[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < h; ++j)
            comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }

    if (!(best_det > kSingularDet))
        throw DegenerateDataError("mcd_exhaustive: optimal scatter is singular (degenerate data)");
    return finish(points, std::move(best_support), cutoff_p);
}

std::vector<ClassOutlierCount> count_outliers_by_class(const McdFit& fit,
                                                       const std::vector<std::string>& labels) {
    if (labels.size() != fit.outlier.size())
        throw std::invalid_argument("count_outliers_by_class: label count mismatch");
    std::map<std::string, ClassOutlierCount> counts;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        ClassOutlierCount& c = counts[labels[i]];
        c.label = labels[i];
        ++c.total;
        if (fit.outlier[i]) ++c.outliers;
    }
    std::vector<ClassOutlierCount> out;
    out.reserve(counts.size());
    for (auto& [_, c] : counts) out.push_back(std::move(c));
    return out;
}

std::string format_percent(long long count, long long total) {
    if (total <= 0) throw std::invalid_argument("format_percent: total must be positive");
    // round-half-up of count/total*1000 in integer arithmetic
    const long long tenths = (count * 2000 + total) / (2 * total);
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10) + "%";
}

}  // namespace lungqa
