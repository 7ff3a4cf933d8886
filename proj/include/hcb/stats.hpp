#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace hcb {

// Welford accumulator; merge() combines partial results in a fixed order.
class RunningStats {
public:
    void add(double x) noexcept {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    void merge(const RunningStats& o) noexcept;

    std::uint64_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double stddev() const noexcept { return std::sqrt(variance()); }
    double se() const noexcept { return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Median of the means of `blocks` consecutive, equal-size blocks (the
// remainder goes to the last block).
double median_of_means(std::span<const double> xs, std::size_t blocks = 32);
double median_of_means(std::span<const RunningStats> block_stats);

// z-score of an observed frequency against a known probability.
double binomial_z(std::uint64_t hits, std::uint64_t n, double p);

// z-score of the difference of two independent estimates.
inline double difference_z(double a, double se_a, double b, double se_b) {
    const double s = std::hypot(se_a, se_b);
    return s > 0 ? (a - b) / s : (a == b ? 0.0 : INFINITY);
}

// Standard error of the sample variance, from the fourth central moment.
struct VarianceEstimate {
    double variance = 0.0;
    double se = 0.0;
};
VarianceEstimate variance_with_se(std::span<const double> xs);

// Percentile bootstrap interval for the variance.
struct Interval {
    double lo = 0.0, hi = 0.0;
};
Interval bootstrap_variance_ci(std::span<const double> xs, std::size_t resamples, double level, std::uint64_t seed);

// Least-squares slope and intercept of y on x.
struct LineFit {
    double slope = 0.0, intercept = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace hcb
