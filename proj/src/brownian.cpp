#include "polylab/brownian.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "polylab/errors.hpp"
#include "polylab/logsum.hpp"
#include "polylab/rng.hpp"
#include "polylab/stats.hpp"

namespace polylab::brownian {

namespace {

void check_args(double horizon, std::int64_t lines, std::int64_t steps) {
    if (!(horizon > 0.0)) throw std::invalid_argument("brownian: horizon must be > 0");
    if (lines < 1) throw std::invalid_argument("brownian: need at least one line");
    if (steps < 1) throw std::invalid_argument("brownian: need at least one grid step");
}

// One line's partial sums written into out[0..steps]; out[0] = 0.
void fill_line(std::vector<double>& out, std::uint64_t seed, std::int64_t line, double sd) {
    rng::Stream s(rng::replicate_seed(seed, static_cast<std::uint64_t>(line)));
    double b = 0.0;
    out[0] = 0.0;
    for (std::size_t k = 1; k < out.size(); ++k) {
        b += sd * rng::next_normal(s);
        out[k] = b;
    }
}

} // namespace

BrownianGrid sample_grid(std::uint64_t seed, double horizon, std::int64_t lines,
                         std::int64_t steps) {
    check_args(horizon, lines, steps);
    BrownianGrid g;
    g.horizon = horizon;
    g.steps = steps;
    g.lines = lines;
    g.values.resize(static_cast<std::size_t>(lines) * static_cast<std::size_t>(steps + 1));
    const double sd = std::sqrt(horizon / static_cast<double>(steps));
    std::vector<double> row(static_cast<std::size_t>(steps) + 1);
    for (std::int64_t i = 0; i < lines; ++i) {
        fill_line(row, seed, i, sd);
        std::copy(row.begin(), row.end(),
                  g.values.begin() + static_cast<std::size_t>(i) * row.size());
    }
    return g;
}

double last_passage_brownian(const BrownianGrid& grid) {
    check_args(grid.horizon, grid.lines, grid.steps);
    const std::size_t n = static_cast<std::size_t>(grid.steps) + 1;
    // d[k] holds D(t_k, line) for the line being absorbed; first line is the
    // path that never switched, i.e. the line itself.
    std::vector<double> d(n);
    for (std::size_t k = 0; k < n; ++k) d[k] = grid.at(0, k);
    for (std::int64_t i = 1; i < grid.lines; ++i) {
        double best = kNegInf;
        for (std::size_t k = 0; k < n; ++k) {
            const double b = grid.at(i, static_cast<std::int64_t>(k));
            if (d[k] - b > best) best = d[k] - b; // switch at t_k allowed (ties weakly increasing)
            d[k] = b + best;
        }
    }
    return d[n - 1];
}

double last_passage_brownian(std::uint64_t seed, double horizon, std::int64_t lines,
                             std::int64_t steps) {
    check_args(horizon, lines, steps);
    const std::size_t n = static_cast<std::size_t>(steps) + 1;
    const double sd = std::sqrt(horizon / static_cast<double>(steps));
    std::vector<double> d(n);
    std::vector<double> line(n);
    fill_line(line, seed, 0, sd);
    d = line;
    for (std::int64_t i = 1; i < lines; ++i) {
        fill_line(line, seed, i, sd);
        double best = kNegInf;
        for (std::size_t k = 0; k < n; ++k) {
            if (d[k] - line[k] > best) best = d[k] - line[k];
            d[k] = line[k] + best;
        }
    }
    return d[n - 1];
}

namespace {

double log_partition_impl(double horizon, std::int64_t lines, std::int64_t steps, double beta,
                          bool normalized, const std::function<void(std::vector<double>&, std::int64_t)>& load_line) {
    check_args(horizon, lines, steps);
    const std::size_t n = static_cast<std::size_t>(steps) + 1;
    const double logdt = std::log(horizon / static_cast<double>(steps));
    std::vector<double> z(n); // log zeta for the current line
    std::vector<double> line(n);
    load_line(line, 0);
    for (std::size_t k = 0; k < n; ++k) z[k] = beta * line[k];
    for (std::int64_t i = 1; i < lines; ++i) {
        load_line(line, i);
        LogSumAcc acc; // lse over switch indices l <= k-1 of z_prev[l] - beta B_i[l]
        for (std::size_t k = 0; k < n; ++k) {
            const double prev = z[k];
            const double tail = acc.value(); // -inf while no switch index is available
            z[k] = (tail == kNegInf) ? kNegInf : beta * line[k] + logdt + tail;
            acc.add(prev - beta * line[k]);
        }
    }
    double out = z[n - 1];
    if (std::isnan(out)) throw numeric_error("log_partition_brownian: NaN in recursion");
    if (normalized)
        out -= static_cast<double>(lines - 1) * std::log(horizon) -
               std::lgamma(static_cast<double>(lines));
    return out;
}

} // namespace

double log_partition_brownian(const BrownianGrid& grid, double beta, bool normalized) {
    return log_partition_impl(grid.horizon, grid.lines, grid.steps, beta, normalized,
                              [&](std::vector<double>& row, std::int64_t i) {
                                  for (std::size_t k = 0; k < row.size(); ++k)
                                      row[k] = grid.at(i, static_cast<std::int64_t>(k));
                              });
}

double log_partition_brownian(std::uint64_t seed, double horizon, std::int64_t lines,
                              std::int64_t steps, double beta, bool normalized) {
    const double sd = std::sqrt(horizon / static_cast<double>(steps));
    return log_partition_impl(horizon, lines, steps, beta, normalized,
                              [&](std::vector<double>& row, std::int64_t i) {
                                  fill_line(row, seed, i, sd);
                              });
}

std::pair<double, double> scaling_pair(std::uint64_t seed, double n, std::int64_t lines,
                                       std::int64_t steps) {
    if (!(n > 0.0)) throw std::invalid_argument("scaling_pair: n must be > 0");
    const double unit = last_passage_brownian(seed, 1.0, lines, steps);
    const double stretched = last_passage_brownian(seed, n, lines, steps);
    return {std::sqrt(n) * unit, stretched};
}

double scaling_check(std::int64_t m_lines, double n, int reps, std::uint64_t seed,
                     std::int64_t steps) {
    if (!(n > 0.0)) throw std::invalid_argument("scaling_check: n must be > 0");
    if (reps < 100) throw std::invalid_argument("scaling_check: reps >= 100");
    std::vector<double> unit(static_cast<std::size_t>(reps));
    std::vector<double> stretched(static_cast<std::size_t>(reps));
    const double root = std::sqrt(n);
    stats::parallel_for(reps, [&](std::int64_t r) {
        const auto s = static_cast<std::size_t>(r);
        unit[s] = root * last_passage_brownian(rng::replicate_seed(seed, 2 * std::uint64_t(r)),
                                               1.0, m_lines, steps);
        stretched[s] = last_passage_brownian(
            rng::replicate_seed(seed, 2 * std::uint64_t(r) + 1), n, m_lines, steps);
    });
    return stats::ks_two_sample(unit, stretched);
}

} // namespace polylab::brownian
