#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polylab/env.hpp"
#include "polylab/polymer.hpp"
#include "polylab/scaling.hpp"
#include "polylab/stats.hpp"

namespace polylab::drift {

// Tilted sum over endpoints of the anti-diagonal i + j = N at fixed beta:
//   Z^(h) = sum_{1 <= n <= N} Zbar_beta(n, N-n) exp(-h_N (N-n)),
// h_N = gamma N^{(1-a)/2}. The tilt concentrates the sum on endpoints with
// N - n of order N^a, where log Zbar ~ 2 beta sqrt(n(N-n)); the normalized
// value log Z^(h) / N^{(1+a)/2} approaches beta^2/gamma.
struct DriftResult {
    std::int64_t n_total = 0;
    ScalingRegime regime;
    polymer::LogWeight log_z{0.0}; // log Z^(h_N), unnormalized sum
    std::int64_t argmax_n = 0;     // n of the single largest term
    double predictor = 0.0;        // Laplace prediction of log Z^(h_N)
};

// Endpoints with N - n beyond this width are dropped from the sum: their
// tilt penalty exceeds any energy the strip can offer, leaving relative mass
// below e^{-N^{0.05}}-ish. Cuts the sweep from N x N to N x width.
std::int64_t truncation_width(std::int64_t n_total, const ScalingRegime& regime);

// One forward sweep over the strip {i <= N, j <= min(width, N - i)}
// accumulating every anti-diagonal term. The field must cover the strip.
DriftResult drifted_log_partition(const env::EnvField& field, std::int64_t n_total,
                                  const ScalingRegime& regime);
DriftResult drifted_log_partition(const env::DenseField& field, std::int64_t n_total,
                                  const ScalingRegime& regime);
DriftResult drifted_log_partition(const env::DistSpec& dist, std::int64_t n_total,
                                  const ScalingRegime& regime);

// Laplace-method prediction: maximizes
//   f_N(u) = 2 beta sqrt(u)/(1+u) - gamma N^{(1-a)/2} u/(1+u)
// over u > 0 (u parametrizes the endpoint through n = N/(1+u)). value is
// N f_N(u*). Asymptotics: u* ~ (beta/gamma)^2 N^{a-1} and
// value ~ (beta^2/gamma) N^{(1+a)/2}.
struct LaplacePrediction {
    double u_star = 0.0;
    double value = 0.0;
};
LaplacePrediction laplace_predictor(std::int64_t n_total, const ScalingRegime& regime);

// Growth of the centered second moment
//   m2(N) = E[ (log Z^(h_N) - (beta^2/gamma) N^{(1+a)/2})^2 ]
// across sizes: ordinary least squares of log m2 against log N, with a
// percentile-bootstrap interval for the slope.
struct FluctuationScan {
    std::vector<std::int64_t> n_values;
    std::vector<double> second_moment;
    std::vector<std::vector<double>> log_values; // raw log Z^(h_N), one row per size
    stats::OlsFit fit;            // log m2 on log N
    double slope_lo = 0.0;        // bootstrap 95% band
    double slope_hi = 0.0;
    std::vector<double> residuals;
};
FluctuationScan drift_fluctuations(const env::DistSpec& dist, const ScalingRegime& regime,
                                   std::span<const std::int64_t> n_values, int reps,
                                   std::uint64_t seed);

// Empirical large-deviation frequencies of the normalized value around its
// limit: upper_freq[k] = P(dev >= eps[k]), lower_freq[k] = P(dev <= -eps[k])
// where dev = log Z^(h_N) / ((beta^2/gamma) N^{(1+a)/2}) - 1. The *_scale
// columns report the comparison exponents N^a eps^{3/2} and N^{2a} eps^3.
struct TailProfile {
    std::int64_t n_total = 0;
    std::vector<double> eps;
    std::vector<double> upper_freq, lower_freq;
    std::vector<double> upper_scale, lower_scale;
    std::vector<double> deviations; // one per replicate
};
TailProfile deviation_tail_profile(const env::DistSpec& dist, const ScalingRegime& regime,
                                   std::int64_t n, int reps, std::span<const double> eps_grid,
                                   std::uint64_t seed);

} // namespace polylab::drift
