#include "polylab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "polylab/rng.hpp"

namespace polylab::stats {

double mean(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("mean: empty sample");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
    if (v.size() < 2) throw std::invalid_argument("variance: need at least two points");
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

double stddev(std::span<const double> v) { return std::sqrt(variance(v)); }

double quantile(std::vector<double> v, double p) {
    if (v.empty()) throw std::invalid_argument("quantile: empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p outside [0,1]");
    std::sort(v.begin(), v.end());
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= v.size()) return v.back();
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

OlsFit ols(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("ols: need matching samples with at least 3 points");
    const auto n = static_cast<double>(x.size());
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("ols: degenerate x sample");
    OlsFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        ssr += r * r;
        syy += (y[i] - my) * (y[i] - my);
    }
    fit.slope_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
    fit.r2 = (syy == 0.0) ? 1.0 : 1.0 - ssr / syy;
    return fit;
}

double ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
    std::sort(sample.begin(), sample.end());
    const auto n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, f - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double t = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= t) ++i;
        while (j < b.size() && b[j] <= t) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

std::pair<double, double> bootstrap_slope(std::span<const double> x, std::span<const double> y,
                                          std::int64_t rounds, std::uint64_t seed,
                                          double coverage) {
    if (rounds < 2) throw std::invalid_argument("bootstrap_slope: need at least 2 rounds");
    if (!(coverage > 0.0 && coverage < 1.0))
        throw std::invalid_argument("bootstrap_slope: coverage in (0,1)");
    const std::size_t n = x.size();
    if (y.size() != n || n < 3) throw std::invalid_argument("bootstrap_slope: bad samples");
    const double full_slope = ols(x, y).slope;
    std::vector<double> slopes(static_cast<std::size_t>(rounds));
    std::vector<double> rx(n), ry(n);
    for (std::int64_t r = 0; r < rounds; ++r) {
        rng::Stream s(rng::replicate_seed(seed, static_cast<std::uint64_t>(r)));
        for (std::size_t k = 0; k < n; ++k) {
            const auto pick = static_cast<std::size_t>(s.next_u64() % n);
            rx[k] = x[pick];
            ry[k] = y[pick];
        }
        try {
            slopes[static_cast<std::size_t>(r)] = ols(rx, ry).slope;
        } catch (const std::invalid_argument&) {
            // all-equal resample; vanishing probability, keep the full fit
            slopes[static_cast<std::size_t>(r)] = full_slope;
        }
    }
    const double alpha = 1.0 - coverage;
    return {quantile(slopes, alpha / 2.0), quantile(slopes, 1.0 - alpha / 2.0)};
}

int thread_count() {
    if (const char* env = std::getenv("POLYLAB_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& body) {
    if (n <= 0) return;
    const int workers = std::min<std::int64_t>(thread_count(), n);
    if (workers <= 1) {
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::int64_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min(n, lo + chunk);
        pool.emplace_back([lo, hi, &body] {
            for (std::int64_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace polylab::stats
