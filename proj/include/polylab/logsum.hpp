#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

namespace polylab {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(e^a + e^b), stable for any ordering; -inf acts as the empty term.
inline double log_sum_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = (a > b) ? a : b;
    const double d = (a > b) ? b - a : a - b;
    // exp underflows anyway below ~-745; skipping it keeps the fast path tight.
    if (d < -40.0) return m;
    return m + std::log1p(std::exp(d));
}

// Pairwise (tournament) reduction of a list of log-terms. Associativity-safe
// to ~1e-15: used where the same mass is summed in different orders.
inline double log_sum_exp(std::span<const double> v) {
    if (v.empty()) return kNegInf;
    double m = v[0];
    for (double x : v) m = (x > m) ? x : m;
    if (m == kNegInf) return kNegInf;
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - m);
    return m + std::log(acc);
}

// Running accumulator for a stream of log-terms; rescales when a new max
// arrives. add() is O(1) and does not require sorted input.
struct LogSumAcc {
    double max = kNegInf;
    double acc = 0.0; // sum of exp(term - max)
    void add(double x) {
        if (x == kNegInf) return;
        if (x <= max) {
            acc += std::exp(x - max);
        } else {
            acc = acc * std::exp(max - x) + 1.0;
            max = x;
        }
    }
    double value() const {
        if (max == kNegInf) return kNegInf;
        return max + std::log(acc);
    }
};

// log C(n, k) via log-Gamma; exact enough (~1e-13 relative) for all n used here.
inline double log_binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return kNegInf;
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

// log of the multinomial coefficient (sum parts)! / prod parts_i!.
inline double log_multinomial(std::span<const std::int64_t> parts) {
    double tot = 0.0, denom = 0.0;
    for (std::int64_t p : parts) {
        tot += static_cast<double>(p);
        denom += std::lgamma(static_cast<double>(p) + 1.0);
    }
    return std::lgamma(tot + 1.0) - denom;
}

} // namespace polylab
