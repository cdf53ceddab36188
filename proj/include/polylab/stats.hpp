#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace polylab::stats {

double mean(std::span<const double> v);
double variance(std::span<const double> v); // unbiased, n >= 2
double stddev(std::span<const double> v);

// Linear interpolation between order statistics (the common "type 7" rule);
// p in [0, 1], sample need not be sorted.
double quantile(std::vector<double> v, double p);

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0; // residual-based, n - 2 dof
    double r2 = 0.0;
};
OlsFit ols(std::span<const double> x, std::span<const double> y);

// Kolmogorov-Smirnov statistics. The one-sample form compares against a cdf
// callable; both sort internally.
double ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Percentile bootstrap interval for the OLS slope of y on x; resamples pairs
// with a deterministic stream. Returns {lo, hi} at the given coverage.
std::pair<double, double> bootstrap_slope(std::span<const double> x, std::span<const double> y,
                                          std::int64_t rounds, std::uint64_t seed,
                                          double coverage = 0.95);

// Runs body(i) for i in [0, n) across POLYLAB_THREADS workers (default 1).
// Static block partition: which thread runs an index never affects results,
// callers write into per-index slots.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& body);

int thread_count(); // resolved POLYLAB_THREADS value

} // namespace polylab::stats
