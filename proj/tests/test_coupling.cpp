#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "polylab/coupling.hpp"
#include "polylab/errors.hpp"
#include "polylab/rng.hpp"

using namespace polylab;

namespace {

// exact binomial coefficient in double (safe through a ~ 40)
double choose_d(std::int64_t a, std::int64_t b) {
    if (b < 0 || b > a) return 0.0;
    double r = 1.0;
    for (std::int64_t i = 0; i < b; ++i) r = r * double(a - i) / double(i + 1);
    return r;
}

std::vector<double> binomial_cdf_table(std::int64_t n) {
    std::vector<double> cdf(static_cast<std::size_t>(n) + 1);
    const double lg = std::lgamma(double(n + 1)), l2 = double(n) * std::log(2.0);
    double acc = 0.0;
    for (std::int64_t k = 0; k <= n; ++k) {
        acc += std::exp(lg - std::lgamma(double(k + 1)) - std::lgamma(double(n - k + 1)) - l2);
        cdf[static_cast<std::size_t>(k)] = acc;
    }
    return cdf;
}

std::int64_t scan_quantile(const std::vector<double>& cdf, double u) {
    for (std::size_t k = 0; k < cdf.size(); ++k)
        if (cdf[k] >= u) return static_cast<std::int64_t>(k);
    return static_cast<std::int64_t>(cdf.size()) - 1;
}

double median_gap(env::DistKind kind, int levels, int seeds) {
    std::vector<double> g;
    for (int r = 0; r < seeds; ++r)
        g.push_back(coupling::sup_gap(coupling::dyadic_coupling(kind, levels, 3000 + r)));
    auto mid = g.begin() + g.size() / 2;
    std::nth_element(g.begin(), mid, g.end());
    return *mid;
}

} // namespace

TEST_CASE("gaussian coupling is the identity") {
    const auto p = coupling::dyadic_coupling(env::DistKind::gaussian, 8, 11);
    REQUIRE(p.n == 256);
    REQUIRE(p.walk.size() == 257);
    for (std::size_t k = 0; k < p.walk.size(); ++k) CHECK(p.walk[k] == p.brownian[k]);
    CHECK(coupling::sup_gap(p) == 0.0);
}

TEST_CASE("rademacher walk has unit steps of alternating parity") {
    const auto p = coupling::dyadic_coupling(env::DistKind::rademacher, 10, 5);
    CHECK(p.walk[0] == 0.0);
    for (std::int64_t k = 1; k <= p.n; ++k) {
        const double st = p.walk[std::size_t(k)] - p.walk[std::size_t(k) - 1];
        CHECK(std::fabs(st) == 1.0);
        CHECK((k + std::llround(p.walk[std::size_t(k)])) % 2 == 0);
    }
    CHECK(coupling::sup_gap(p) >= std::fabs(p.walk.back() - p.brownian.back()));
}

TEST_CASE("coupling is deterministic in the seed") {
    const auto a = coupling::dyadic_coupling(env::DistKind::rademacher, 9, 77);
    const auto b = coupling::dyadic_coupling(env::DistKind::rademacher, 9, 77);
    const auto c = coupling::dyadic_coupling(env::DistKind::rademacher, 9, 78);
    CHECK(a.walk == b.walk);
    CHECK(a.brownian == b.brownian);
    CHECK(a.walk != c.walk);
}

TEST_CASE("dyadic block sums refine exactly") {
    const auto p = coupling::dyadic_coupling(env::DistKind::rademacher, 8, 23);
    for (std::int64_t size = p.n; size >= 2; size /= 2) {
        for (std::int64_t a = 0; a < p.n; a += size) {
            const std::int64_t b = a + size, mid = a + size / 2;
            const double whole = p.walk[std::size_t(b)] - p.walk[std::size_t(a)];
            const double parts = (p.walk[std::size_t(mid)] - p.walk[std::size_t(a)]) +
                                 (p.walk[std::size_t(b)] - p.walk[std::size_t(mid)]);
            CHECK(whole == parts); // integer-valued in double: exact
            CHECK(std::fabs(whole) <= double(size));
        }
    }
}

TEST_CASE("walk total is the quantile transform of the path endpoint") {
    for (std::uint64_t seed : {1u, 2u, 3u, 40u}) {
        const auto p = coupling::dyadic_coupling(env::DistKind::rademacher, 11, seed);
        const double u = rng::normal_cdf(p.brownian.back() / std::sqrt(double(p.n)));
        const std::int64_t ones = coupling::binomial_half_quantile(p.n, u);
        CHECK(2 * ones - p.n == std::llround(p.walk.back()));
    }
}

TEST_CASE("binomial quantile inverts the enumerated cdf") {
    for (std::int64_t n : {1, 2, 3, 7, 16, 24}) {
        const auto cdf = binomial_cdf_table(n);
        for (std::int64_t k = 0; k <= n; ++k) {
            const double c = cdf[std::size_t(k)];
            CHECK(coupling::binomial_half_quantile(n, c - 1e-12) == scan_quantile(cdf, c - 1e-12));
            if (k < n)
                CHECK(coupling::binomial_half_quantile(n, c + 1e-12) ==
                      scan_quantile(cdf, c + 1e-12));
        }
        CHECK(coupling::binomial_half_quantile(n, 1e-300) == 0);
        CHECK(coupling::binomial_half_quantile(n, 1.0 - 1e-16) == n);
    }
    // even-n median lands dead center
    CHECK(coupling::binomial_half_quantile(1 << 22, 0.5) == (1 << 21));
    CHECK_THROWS_AS(coupling::binomial_half_quantile(0, 0.5), std::invalid_argument);
}

TEST_CASE("hypergeometric quantile inverts the enumerated cdf") {
    for (std::int64_t m : {2, 4, 8, 12, 20}) {
        const std::int64_t half = m / 2;
        for (std::int64_t ones = 0; ones <= m; ++ones) {
            const std::int64_t lo = std::max<std::int64_t>(0, ones - half);
            const std::int64_t hi = std::min(half, ones);
            std::vector<double> cdf;
            double acc = 0.0;
            for (std::int64_t h = lo; h <= hi; ++h) {
                acc += choose_d(half, h) * choose_d(half, ones - h) / choose_d(m, ones);
                cdf.push_back(acc);
            }
            for (std::int64_t h = lo; h <= hi; ++h) {
                const double c = cdf[std::size_t(h - lo)];
                CHECK(coupling::hypergeometric_half_quantile(m, ones, c - 1e-12) ==
                      lo + scan_quantile(cdf, c - 1e-12));
                if (h < hi)
                    CHECK(coupling::hypergeometric_half_quantile(m, ones, c + 1e-12) ==
                          lo + scan_quantile(cdf, c + 1e-12));
            }
        }
    }
    CHECK_THROWS_AS(coupling::hypergeometric_half_quantile(3, 1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(coupling::hypergeometric_half_quantile(4, 5, 0.5), std::invalid_argument);
}

TEST_CASE("four-step walks hit all sign patterns uniformly") {
    // every increment pattern of a length-4 walk has probability 1/16; the
    // coupling must not distort the joint law, only correlate it with T
    const int reps = 32000;
    std::vector<int> hits(16, 0);
    for (int r = 0; r < reps; ++r) {
        const auto p = coupling::dyadic_coupling(env::DistKind::rademacher, 2, 100000 + r);
        int idx = 0;
        for (int k = 1; k <= 4; ++k)
            idx = 2 * idx + (p.walk[std::size_t(k)] > p.walk[std::size_t(k) - 1] ? 1 : 0);
        ++hits[std::size_t(idx)];
    }
    const double expected = reps / 16.0;
    double chi2 = 0.0;
    for (int c : hits) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 30.578); // 99th percentile, 15 degrees of freedom
}

TEST_CASE("endpoint marginal matches the exact binomial law") {
    const int reps = 10000, levels = 10;
    const std::int64_t n = 1 << levels;
    const auto cdf = binomial_cdf_table(n);
    // z-bins of width 1/2 sigma out to +-2 sigma on the +1 count
    const double sigma = 0.5 * std::sqrt(double(n));
    std::vector<std::int64_t> edges;
    for (int j = -4; j <= 4; ++j) edges.push_back(std::llround(n / 2.0 + j * 0.5 * sigma));
    std::vector<int> hits(edges.size() + 1, 0);
    for (int r = 0; r < reps; ++r) {
        const auto p = coupling::dyadic_coupling(env::DistKind::rademacher, levels, 777000 + r);
        const std::int64_t ones = (std::llround(p.walk.back()) + n) / 2;
        std::size_t bin = 0;
        while (bin < edges.size() && ones > edges[bin]) ++bin;
        ++hits[bin];
    }
    double chi2 = 0.0;
    for (std::size_t bin = 0; bin < hits.size(); ++bin) {
        const double above = bin > 0 ? cdf[std::size_t(edges[bin - 1])] : 0.0;
        const double upto = bin < edges.size() ? cdf[std::size_t(edges[bin])] : 1.0;
        const double expected = reps * (upto - above);
        REQUIRE(expected > 20.0);
        chi2 += (hits[bin] - expected) * (hits[bin] - expected) / expected;
    }
    CHECK(chi2 < 21.666); // 99th percentile, 9 degrees of freedom
}

TEST_CASE("median sup gap grows slower than the horizon") {
    const double m6 = median_gap(env::DistKind::rademacher, 6, 60);
    const double m12 = median_gap(env::DistKind::rademacher, 12, 60);
    CHECK(m6 > 0.0);
    CHECK(m12 > 0.0);
    CHECK(m12 / m6 <= 2.0 * 12.0 / 6.0);
}

TEST_CASE("coupling rejects unsupported inputs") {
    CHECK_THROWS_AS(coupling::dyadic_coupling(env::DistKind::centered_exponential, 4, 1),
                    unsupported_error);
    CHECK_THROWS_AS(coupling::dyadic_coupling(env::DistKind::centered_uniform, 4, 1),
                    unsupported_error);
    CHECK_THROWS_AS(coupling::dyadic_coupling(env::DistKind::rademacher, 23, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(coupling::dyadic_coupling(env::DistKind::rademacher, -1, 1),
                    std::invalid_argument);
}
