#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace polylab::brownian {

// m independent standard Brownian lines on [0, horizon], sampled at the
// K + 1 uniform grid points k * horizon / K. Line i draws its increments
// from the sequential stream seeded with replicate_seed(seed, i), so a grid
// is reproducible line by line and extendable in m without disturbing
// earlier lines.
struct BrownianGrid {
    double horizon = 1.0;
    std::int64_t steps = 0; // K
    std::int64_t lines = 0; // m
    std::vector<double> values; // lines x (steps + 1), row-major

    double at(std::int64_t line, std::int64_t k) const {
        return values[static_cast<std::size_t>(line) * static_cast<std::size_t>(steps + 1) +
                      static_cast<std::size_t>(k)];
    }
    double dt() const { return horizon / static_cast<double>(steps); }
};

BrownianGrid sample_grid(std::uint64_t seed, double horizon, std::int64_t lines,
                         std::int64_t steps);

// Last passage across lines 1..m: start on line 1 at time 0, switch to the
// next line at weakly increasing times, collect each line's increment:
//   D(t, i) = B_i(t) + max_{s <= t} ( D(s, i-1) - B_i(s) ),  D(t, 1) = B_1(t),
// maximized over grid switch times. For m lines D(horizon, m) has the law of
// the top eigenvalue scaling limit as the grid refines.
double last_passage_brownian(const BrownianGrid& grid);

// Streamed evaluation over a fresh grid, O(steps) memory however many lines;
// identical value to sampling the grid and running the dense version.
double last_passage_brownian(std::uint64_t seed, double horizon, std::int64_t lines,
                             std::int64_t steps);

// Log partition function of the continuous polymer over the same paths:
//   Z = int_{0 <= s_1 <= ... <= s_{m-1} <= t} exp(beta * E(s)) ds,
// E the path energy above. Left-endpoint quadrature on the grid: switch
// indices are strictly increasing and each interior line contributes one
// factor dt. `normalized` divides by the simplex volume t^{m-1}/(m-1)!.
double log_partition_brownian(const BrownianGrid& grid, double beta, bool normalized = false);

double log_partition_brownian(std::uint64_t seed, double horizon, std::int64_t lines,
                              std::int64_t steps, double beta, bool normalized = false);

// Diffusive rescaling: stretching the horizon by n multiplies last passage
// values by sqrt(n) in law, and pathwise when the two grids share increment
// streams. Returns {sqrt(n) * D_[0,1], D_[0,n]} computed from the same seed;
// the two coincide up to rounding.
std::pair<double, double> scaling_pair(std::uint64_t seed, double n, std::int64_t lines,
                                       std::int64_t steps);

// Distributional form of the same identity: samples last passage over
// horizon n and, independently, sqrt(n) times last passage over horizon 1,
// both with `steps` grid points so the two grids map onto each other under
// the rescaling, and returns the two-sample Kolmogorov-Smirnov distance.
// The identity is exact in law at matched grids, so the distance is pure
// two-sample noise. Requires reps >= 100.
double scaling_check(std::int64_t m_lines, double n, int reps, std::uint64_t seed,
                     std::int64_t steps = 400);

} // namespace polylab::brownian
