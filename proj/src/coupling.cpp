#include "polylab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polylab/errors.hpp"
#include "polylab/rng.hpp"

namespace polylab::coupling {

namespace {

// Smallest k in [lo, hi] with cdf(k) >= u, for a unimodal lattice pmf given
// by its value at the mode and the ratio pmf(k+1)/pmf(k). Works outward from
// the mode, so nothing underflows where mass matters; terms below ~1e-300
// are dropped, far beyond anything a double uniform can resolve. u outside
// (0, 1) lands on the support ends.
template <class Ratio>
std::int64_t pmf_quantile(std::int64_t lo, std::int64_t hi, std::int64_t mode,
                          double pmf_mode, double u, Ratio ratio) {
    double below = 0.0; // mass strictly below the mode
    {
        double p = pmf_mode;
        for (std::int64_t k = mode; k > lo; --k) {
            p /= ratio(k - 1);
            if (p == 0.0) break;
            below += p;
        }
    }
    double c = below + pmf_mode; // cdf(mode)
    if (u <= c) {
        std::int64_t k = mode;
        double p = pmf_mode;
        while (k > lo && c - p >= u) { // cdf(k-1) still at or above u
            c -= p;
            p /= ratio(k - 1);
            --k;
        }
        return k;
    }
    std::int64_t k = mode;
    double p = pmf_mode;
    while (k < hi && c < u) {
        p *= ratio(k);
        ++k;
        c += p;
        if (p == 0.0) break; // mass above is below resolution: clamp here
    }
    return k;
}

double log_choose(std::int64_t a, std::int64_t b) {
    return std::lgamma(double(a + 1)) - std::lgamma(double(b + 1)) -
           std::lgamma(double(a - b + 1));
}

} // namespace

std::int64_t binomial_half_quantile(std::int64_t n, double u) {
    if (n < 1) throw std::invalid_argument("binomial_half_quantile: n >= 1");
    const std::int64_t mode = n / 2;
    const double pmf_mode =
        std::exp(log_choose(n, mode) - double(n) * 0.6931471805599453);
    return pmf_quantile(0, n, mode, pmf_mode, u,
                        [n](std::int64_t k) { return double(n - k) / double(k + 1); });
}

std::int64_t hypergeometric_half_quantile(std::int64_t m, std::int64_t ones, double u) {
    if (m < 2 || m % 2 != 0)
        throw std::invalid_argument("hypergeometric_half_quantile: even m >= 2");
    if (ones < 0 || ones > m)
        throw std::invalid_argument("hypergeometric_half_quantile: ones in [0, m]");
    const std::int64_t half = m / 2;
    const std::int64_t lo = std::max<std::int64_t>(0, ones - half);
    const std::int64_t hi = std::min(half, ones);
    if (lo == hi) return lo;
    std::int64_t mode = (ones + 1) * (half + 1) / (m + 2);
    mode = std::clamp(mode, lo, hi);
    const double pmf_mode =
        std::exp(log_choose(half, mode) + log_choose(half, ones - mode) - log_choose(m, ones));
    auto ratio = [half, ones](std::int64_t h) {
        return double(half - h) * double(ones - h) /
               (double(h + 1) * double(half - ones + h + 1));
    };
    return pmf_quantile(lo, hi, mode, pmf_mode, u, ratio);
}

namespace {

// Assign the +-1 steps of [a, b) given its +1 count: split the count with the
// exact hypergeometric conditional, driven by the standardized Brownian
// bridge midpoint of the block.
void fill_block(const std::vector<double>& t, std::vector<std::int8_t>& step, std::int64_t a,
                std::int64_t b, std::int64_t ones) {
    if (b - a == 1) {
        step[static_cast<std::size_t>(a)] = ones ? 1 : -1;
        return;
    }
    const std::int64_t mid = (a + b) / 2;
    const double xi = (t[static_cast<std::size_t>(mid)] -
                       0.5 * (t[static_cast<std::size_t>(a)] + t[static_cast<std::size_t>(b)])) /
                      std::sqrt(0.25 * double(b - a));
    const std::int64_t left = hypergeometric_half_quantile(b - a, ones, rng::normal_cdf(xi));
    fill_block(t, step, a, mid, left);
    fill_block(t, step, mid, b, ones - left);
}

} // namespace

CoupledPaths dyadic_coupling(env::DistKind kind, int l_levels, std::uint64_t seed) {
    if (l_levels < 0 || l_levels > 22)
        throw std::invalid_argument("dyadic_coupling: l_levels in [0, 22]");
    if (kind != env::DistKind::gaussian && kind != env::DistKind::rademacher)
        throw unsupported_error("dyadic_coupling: no exact conditional quantile for " +
                                env::kind_name(kind) + "; supported: gaussian, rademacher");
    const std::int64_t n = std::int64_t(1) << l_levels;
    CoupledPaths out;
    out.n = n;
    out.dist = env::DistSpec{kind, seed};
    rng::Stream s(seed);
    out.brownian.resize(static_cast<std::size_t>(n) + 1);
    out.brownian[0] = 0.0;
    for (std::int64_t k = 1; k <= n; ++k)
        out.brownian[static_cast<std::size_t>(k)] =
            out.brownian[static_cast<std::size_t>(k - 1)] + rng::next_normal(s);
    if (kind == env::DistKind::gaussian) {
        out.walk = out.brownian;
        return out;
    }
    const double u_root =
        rng::normal_cdf(out.brownian[static_cast<std::size_t>(n)] / std::sqrt(double(n)));
    const std::int64_t ones = binomial_half_quantile(n, u_root);
    std::vector<std::int8_t> step(static_cast<std::size_t>(n));
    fill_block(out.brownian, step, 0, n, ones);
    out.walk.resize(static_cast<std::size_t>(n) + 1);
    out.walk[0] = 0.0;
    for (std::int64_t k = 1; k <= n; ++k) // integer-valued, exact in double
        out.walk[static_cast<std::size_t>(k)] =
            out.walk[static_cast<std::size_t>(k - 1)] + step[static_cast<std::size_t>(k - 1)];
    return out;
}

double sup_gap(const CoupledPaths& p) {
    double worst = 0.0;
    for (std::size_t k = 0; k < p.walk.size(); ++k)
        worst = std::max(worst, std::fabs(p.walk[k] - p.brownian[k]));
    return worst;
}

} // namespace polylab::coupling
