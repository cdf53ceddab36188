#include "doctest.h"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "polylab/brownian.hpp"
#include "polylab/logsum.hpp"

#include "oracles.hpp"

using namespace polylab;

namespace {

// Max over weakly increasing switch indices 0 <= l_1 <= ... <= l_{m-1} <= K
// of sum_i B_i[l_i] - B_i[l_{i-1}] (l_0 = 0, l_m = K), by direct recursion.
double brute_last_passage(const brownian::BrownianGrid& g) {
    std::vector<std::int64_t> l(static_cast<std::size_t>(g.lines) - 1);
    double best = kNegInf;
    auto energy = [&] {
        double e = 0.0;
        std::int64_t prev = 0;
        for (std::int64_t i = 0; i < g.lines; ++i) {
            const std::int64_t cur = (i + 1 < g.lines) ? l[static_cast<std::size_t>(i)] : g.steps;
            e += g.at(i, cur) - g.at(i, prev);
            prev = cur;
        }
        return e;
    };
    std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t pos, std::int64_t lo) {
        if (pos == l.size()) {
            const double e = energy();
            if (e > best) best = e;
            return;
        }
        for (std::int64_t v = lo; v <= g.steps; ++v) {
            l[pos] = v;
            rec(pos + 1, v);
        }
    };
    if (l.empty()) return energy();
    rec(0, 0);
    return best;
}

// Same sum with exp(beta .) weights, strictly increasing switch indices in
// {0..K-1} and one dt factor per interior line: the left-endpoint quadrature.
double brute_log_partition(const brownian::BrownianGrid& g, double beta) {
    std::vector<std::int64_t> l(static_cast<std::size_t>(g.lines) - 1);
    LogSumAcc acc;
    const double logdt = std::log(g.dt());
    auto add_term = [&] {
        double e = 0.0;
        std::int64_t prev = 0;
        for (std::int64_t i = 0; i < g.lines; ++i) {
            const std::int64_t cur = (i + 1 < g.lines) ? l[static_cast<std::size_t>(i)] : g.steps;
            e += g.at(i, cur) - g.at(i, prev);
            prev = cur;
        }
        acc.add(beta * e + logdt * static_cast<double>(g.lines - 1));
    };
    std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t pos, std::int64_t lo) {
        if (pos == l.size()) {
            add_term();
            return;
        }
        for (std::int64_t v = lo; v <= g.steps - 1; ++v) {
            l[pos] = v;
            rec(pos + 1, v + 1);
        }
    };
    if (l.empty()) {
        add_term();
        return acc.value();
    }
    rec(0, 0);
    return acc.value();
}

} // namespace

TEST_CASE("grid sampling is reproducible and line-extendable") {
    auto g = brownian::sample_grid(5, 2.0, 3, 16);
    auto h = brownian::sample_grid(5, 2.0, 5, 16);
    REQUIRE(g.values.size() == 3 * 17);
    for (std::int64_t i = 0; i < 3; ++i)
        for (std::int64_t k = 0; k <= 16; ++k) CHECK(g.at(i, k) == h.at(i, k));
    CHECK(g.at(0, 0) == 0.0);
    CHECK(g.at(2, 0) == 0.0);
}

TEST_CASE("grid increments have the diffusive variance") {
    auto g = brownian::sample_grid(99, 4.0, 400, 8);
    const auto m = oracles::sample_moments(400 * 8, [&, i = 0]() mutable {
        const auto line = i / 8, k = i % 8;
        ++i;
        return g.at(line, k + 1) - g.at(line, k);
    });
    CHECK(std::fabs(m.mean) < 0.04);
    CHECK(m.var == doctest::Approx(0.5).epsilon(0.1)); // dt = 4/8
}

TEST_CASE("last passage matches exhaustive switch placement") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        for (std::int64_t lines : {1, 2, 3, 4}) {
            auto g = brownian::sample_grid(seed, 1.5, lines, 9);
            CHECK(brownian::last_passage_brownian(g) ==
                  doctest::Approx(brute_last_passage(g)).epsilon(1e-12));
        }
    }
}

TEST_CASE("streamed last passage equals the dense evaluation") {
    for (std::int64_t lines : {1, 3, 6}) {
        auto g = brownian::sample_grid(11, 2.5, lines, 64);
        CHECK(brownian::last_passage_brownian(11, 2.5, lines, 64) ==
              doctest::Approx(brownian::last_passage_brownian(g)).epsilon(1e-12));
    }
}

TEST_CASE("single-line passage is the endpoint value") {
    auto g = brownian::sample_grid(21, 1.0, 1, 32);
    CHECK(brownian::last_passage_brownian(g) == g.at(0, 32));
}

TEST_CASE("immediate and final switching give lower bounds") {
    auto g = brownian::sample_grid(31, 1.0, 4, 50);
    const double d = brownian::last_passage_brownian(g);
    CHECK(d >= g.at(3, 50) - 1e-12); // all switches at time 0
    CHECK(d >= g.at(0, 50) - 1e-12); // all switches at the horizon
}

TEST_CASE("polymer recursion matches exhaustive quadrature") {
    for (std::uint64_t seed : {4ull, 5ull}) {
        for (std::int64_t lines : {1, 2, 3, 4}) {
            auto g = brownian::sample_grid(seed, 1.5, lines, 10);
            for (double beta : {0.5, 2.0}) {
                CHECK(brownian::log_partition_brownian(g, beta) ==
                      doctest::Approx(brute_log_partition(g, beta)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("streamed polymer equals the dense evaluation and normalizes") {
    auto g = brownian::sample_grid(6, 3.0, 5, 48);
    const double a = brownian::log_partition_brownian(g, 1.25);
    CHECK(brownian::log_partition_brownian(6, 3.0, 5, 48, 1.25) ==
          doctest::Approx(a).epsilon(1e-12));
    const double norm = 4.0 * std::log(3.0) - std::lgamma(5.0);
    CHECK(brownian::log_partition_brownian(g, 1.25, true) ==
          doctest::Approx(a - norm).epsilon(1e-12));
}

TEST_CASE("polymer mass is dominated by the max path times the volume") {
    auto g = brownian::sample_grid(17, 2.0, 4, 40);
    for (double beta : {0.5, 3.0}) {
        CHECK(brownian::log_partition_brownian(g, beta, true) <=
              beta * brownian::last_passage_brownian(g) + 1e-10);
    }
}

TEST_CASE("diffusive rescaling is exact pathwise") {
    for (double n : {4.0, 100.0, 1234.5}) {
        const auto [a, b] = brownian::scaling_pair(77, n, 5, 128);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("diffusive rescaling holds in distribution") {
    // matched grids make the identity exact in law, so the distance is the
    // two-sample noise floor
    CHECK(brownian::scaling_check(10, 25.0, 2000, 5) < 0.06);
    // n = 1 compares two independent draws of the same sampler
    CHECK(brownian::scaling_check(4, 1.0, 500, 9, 64) < 0.12);
    // refining the grid must not push the distance up beyond noise
    const double coarse = brownian::scaling_check(10, 25.0, 2000, 5, 100);
    const double fine = brownian::scaling_check(10, 25.0, 2000, 5, 400);
    CHECK(fine <= coarse + 0.03);
    CHECK_THROWS_AS(brownian::scaling_check(10, 25.0, 99, 5), std::invalid_argument);
    CHECK_THROWS_AS(brownian::scaling_check(10, 0.0, 500, 5), std::invalid_argument);
}

TEST_CASE("degenerate grids are rejected") {
    CHECK_THROWS_AS(brownian::sample_grid(1, 0.0, 2, 8), std::invalid_argument);
    CHECK_THROWS_AS(brownian::sample_grid(1, 1.0, 0, 8), std::invalid_argument);
    CHECK_THROWS_AS(brownian::sample_grid(1, 1.0, 2, 0), std::invalid_argument);
}
