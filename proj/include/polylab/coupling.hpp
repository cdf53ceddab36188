#pragma once

#include <cstdint>
#include <vector>

#include "polylab/env.hpp"

namespace polylab::coupling {

// A random walk S and a Gaussian walk T on the same probability space, S a
// deterministic function of T through exact conditional quantile transforms
// at dyadic scales. Both marginal path laws are exact; the pathwise gap
// max_k |S_k - T_k| stays logarithmic in the horizon.
struct CoupledPaths {
    std::int64_t n = 0;           // horizon, a power of two
    std::vector<double> walk;     // S_0..S_n, S_0 = 0
    std::vector<double> brownian; // T_0..T_n, T_0 = 0
    env::DistSpec dist;
};

// Dyadic quantile coupling over l_levels halvings (horizon 2^l_levels).
//
// gaussian: S == T exactly (every quantile transform is the identity).
// rademacher: the +1 count of the whole path is the Binomial(n, 1/2)
// quantile of Phi(T_n / sqrt n), and each half-block count follows its exact
// hypergeometric conditional driven by the Brownian bridge midpoint of the
// block, recursively down to single steps. Bridge midpoints at distinct
// dyadic nodes are independent standard normals, so every conditional input
// is an exact independent uniform and the walk's increment law comes out
// exactly i.i.d. +-1.
//
// Draws exactly 2^l_levels normals from Stream(seed); S consumes no
// randomness of its own. Requires l_levels <= 22.
CoupledPaths dyadic_coupling(env::DistKind kind, int l_levels, std::uint64_t seed);

// max_{k <= n} |S_k - T_k|
double sup_gap(const CoupledPaths& p);

// Smallest k with P(Binomial(n, 1/2) <= k) >= u. Exact pmf walk anchored at
// the mode; exposed for the distribution tests.
std::int64_t binomial_half_quantile(std::int64_t n, double u);

// Smallest h with P(H <= h) >= u for H hypergeometric: the number of ones
// landing in a fixed half of a block of even size m that carries `ones` ones
// in total.
std::int64_t hypergeometric_half_quantile(std::int64_t m, std::int64_t ones, double u);

} // namespace polylab::coupling
