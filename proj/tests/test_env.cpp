#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "polylab/env.hpp"
#include "polylab/rng.hpp"
#include "polylab/special.hpp"

#include "oracles.hpp"

using namespace polylab;

TEST_CASE("distribution names round trip") {
    for (auto kind : {env::DistKind::gaussian, env::DistKind::rademacher,
                      env::DistKind::centered_exponential, env::DistKind::centered_uniform}) {
        CHECK(env::parse_kind(env::kind_name(kind)) == kind);
    }
    CHECK_THROWS_AS(env::parse_kind("cauchy"), std::invalid_argument);
}

TEST_CASE("samples are centered with unit variance") {
    for (auto kind : {env::DistKind::gaussian, env::DistKind::rademacher,
                      env::DistKind::centered_exponential, env::DistKind::centered_uniform}) {
        rng::Stream s(11);
        const auto m = oracles::sample_moments(
            400000, [&] { return env::sample_from_key(kind, s.next_u64()); });
        CHECK(std::fabs(m.mean) < 8e-3);
        CHECK(m.var == doctest::Approx(1.0).epsilon(0.03));
    }
}

TEST_CASE("rademacher takes only the two unit values") {
    rng::Stream s(3);
    int plus = 0;
    for (int i = 0; i < 10000; ++i) {
        const double x = env::sample_from_key(env::DistKind::rademacher, s.next_u64());
        CHECK((x == 1.0 || x == -1.0));
        plus += (x > 0);
    }
    CHECK(plus > 4700);
    CHECK(plus < 5300);
}

TEST_CASE("log_mgf matches a Monte Carlo estimate of E[exp(beta eta)]") {
    const double beta = 0.3;
    for (auto kind : {env::DistKind::gaussian, env::DistKind::rademacher,
                      env::DistKind::centered_exponential, env::DistKind::centered_uniform}) {
        rng::Stream s(21);
        double acc = 0.0;
        const int n = 400000;
        for (int i = 0; i < n; ++i)
            acc += std::exp(beta * env::sample_from_key(kind, s.next_u64()));
        const double mc = std::log(acc / n);
        CHECK(mc == doctest::Approx(env::log_mgf({kind, 0}, beta)).epsilon(5e-3));
    }
}

TEST_CASE("log_mgf closed forms at a hand-checked point") {
    // rademacher: log cosh(0.7); centered uniform: log(sinh(0.7 sqrt 3)/(0.7 sqrt 3)).
    CHECK(env::log_mgf({env::DistKind::gaussian, 0}, 0.7) == doctest::Approx(0.245).epsilon(1e-12));
    CHECK(env::log_mgf({env::DistKind::rademacher, 0}, 0.7) ==
          doctest::Approx(std::log(std::cosh(0.7))).epsilon(1e-12));
    const double r = 0.7 * std::sqrt(3.0);
    CHECK(env::log_mgf({env::DistKind::centered_uniform, 0}, 0.7) ==
          doctest::Approx(std::log(std::sinh(r) / r)).epsilon(1e-12));
    CHECK(env::log_mgf({env::DistKind::centered_exponential, 0}, 0.7) ==
          doctest::Approx(-0.7 - std::log(0.3)).epsilon(1e-12));
}

TEST_CASE("log_mgf is symmetric for the symmetric laws") {
    for (auto kind : {env::DistKind::gaussian, env::DistKind::rademacher,
                      env::DistKind::centered_uniform}) {
        CHECK(env::log_mgf({kind, 0}, 1.3) ==
              doctest::Approx(env::log_mgf({kind, 0}, -1.3)).epsilon(1e-12));
    }
}

TEST_CASE("exponential mgf blows up at beta = 1") {
    CHECK(std::isfinite(env::log_mgf({env::DistKind::centered_exponential, 0}, 0.999)));
    CHECK_THROWS_AS(env::log_mgf({env::DistKind::centered_exponential, 0}, 1.0),
                    std::domain_error);
    CHECK_THROWS_AS(env::log_mgf({env::DistKind::centered_exponential, 0}, 2.5),
                    std::domain_error);
}

TEST_CASE("second derivative of log_mgf at zero is the unit variance") {
    const double h = 1e-4;
    for (auto kind : {env::DistKind::gaussian, env::DistKind::rademacher,
                      env::DistKind::centered_exponential, env::DistKind::centered_uniform}) {
        const env::DistSpec d{kind, 0};
        const double fd =
            (env::log_mgf(d, h) - 2.0 * env::log_mgf(d, 0.0) + env::log_mgf(d, -h)) / (h * h);
        CHECK(fd == doctest::Approx(1.0).epsilon(1e-5));
    }
}

TEST_CASE("fields are pure functions of seed, kind and coordinate") {
    env::EnvField f({env::DistKind::gaussian, 5}, {10, 10});
    env::EnvField g({env::DistKind::gaussian, 5}, {4, 20});
    env::EnvField h({env::DistKind::gaussian, 6}, {10, 10});
    const std::vector<std::int64_t> c{2, 3};
    CHECK(f.at(c) == f.at(c));
    CHECK(f.at(c) == f.at2(2, 3));
    CHECK(f.at(c) == g.at(c)); // shapes differ, overlap agrees
    CHECK(f.at(c) != h.at(c));
}

TEST_CASE("nearby sites decorrelate") {
    env::EnvField f({env::DistKind::gaussian, 9}, {600, 600});
    double dot = 0.0, n = 0.0;
    for (std::int64_t i = 0; i < 500; ++i)
        for (std::int64_t j = 0; j < 500; j += 7) {
            dot += f.at2(i, j) * f.at2(i, j + 1);
            n += 1.0;
        }
    CHECK(std::fabs(dot / n) < 0.02);
}

TEST_CASE("field access is bounds checked") {
    env::EnvField f({env::DistKind::gaussian, 1}, {3, 4});
    CHECK_THROWS_AS(f.at(std::vector<std::int64_t>{3, 0}), std::out_of_range);
    CHECK_THROWS_AS(f.at(std::vector<std::int64_t>{0, 4}), std::out_of_range);
    CHECK_THROWS_AS(f.at(std::vector<std::int64_t>{-1, 0}), std::out_of_range);
    CHECK_THROWS_AS(f.at(std::vector<std::int64_t>{0}), std::out_of_range);
    CHECK_THROWS_AS(env::EnvField({env::DistKind::gaussian, 1}, {}), std::invalid_argument);
    CHECK_THROWS_AS(env::EnvField({env::DistKind::gaussian, 1}, {3, 0}), std::invalid_argument);
}

TEST_CASE("dense copies agree with the lazy field everywhere") {
    env::EnvField f({env::DistKind::centered_uniform, 13}, {5, 6, 3});
    auto d = env::DenseField::from(f);
    std::vector<std::int64_t> c(3);
    for (c[0] = 0; c[0] < 5; ++c[0])
        for (c[1] = 0; c[1] < 6; ++c[1])
            for (c[2] = 0; c[2] < 3; ++c[2]) CHECK(d.at(c) == f.at(c));
}
