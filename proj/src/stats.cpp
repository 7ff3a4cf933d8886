#include "hcb/stats.hpp"

#include <algorithm>
#include <stdexcept>

#include "hcb/philox.hpp"

namespace hcb {

void RunningStats::merge(const RunningStats& o) noexcept {
    if (o.n_ == 0) return;
    if (n_ == 0) {
        *this = o;
        return;
    }
    const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
    const double d = o.mean_ - mean_;
    const double n = na + nb;
    mean_ += d * nb / n;
    m2_ += o.m2_ + d * d * na * nb / n;
    n_ += o.n_;
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of nothing");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

}  // namespace

double median_of_means(std::span<const double> xs, std::size_t blocks) {
    blocks = std::clamp<std::size_t>(blocks, 1, std::max<std::size_t>(xs.size(), 1));
    const std::size_t size = xs.size() / blocks;
    std::vector<double> means;
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t lo = b * size, hi = b + 1 == blocks ? xs.size() : lo + size;
        double s = 0;
        for (std::size_t i = lo; i < hi; ++i) s += xs[i];
        means.push_back(s / static_cast<double>(hi - lo));
    }
    return median(std::move(means));
}

double median_of_means(std::span<const RunningStats> block_stats) {
    std::vector<double> means;
    for (const auto& b : block_stats) means.push_back(b.mean());
    return median(std::move(means));
}

double binomial_z(std::uint64_t hits, std::uint64_t n, double p) {
    const double nn = static_cast<double>(n);
    const double se = std::sqrt(p * (1 - p) / nn);
    return (static_cast<double>(hits) / nn - p) / se;
}

VarianceEstimate variance_with_se(std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= n;
    double m2 = 0, m4 = 0;
    for (double x : xs) {
        const double d2 = (x - mean) * (x - mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= n;
    m4 /= n;
    VarianceEstimate v;
    v.variance = m2 * n / (n - 1);
    v.se = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n);
    return v;
}

Interval bootstrap_variance_ci(std::span<const double> xs, std::size_t resamples, double level, std::uint64_t seed) {
    Philox4x32 rng(seed, 0);
    std::vector<double> vars;
    vars.reserve(resamples);
    const std::size_t n = xs.size();
    for (std::size_t r = 0; r < resamples; ++r) {
        RunningStats s;
        for (std::size_t i = 0; i < n; ++i) s.add(xs[rng() % n]);
        vars.push_back(s.variance());
    }
    std::sort(vars.begin(), vars.end());
    const double a = (1 - level) / 2;
    const auto at = [&](double q) {
        const auto k = static_cast<std::size_t>(std::clamp(q * static_cast<double>(resamples - 1), 0.0,
                                                           static_cast<double>(resamples - 1)));
        return vars[k];
    };
    return {at(a), at(1 - a)};
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

}  // namespace hcb
