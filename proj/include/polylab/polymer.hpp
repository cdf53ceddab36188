#pragma once

#include <cstdint>
#include <vector>

#include "polylab/env.hpp"
#include "polylab/lpp.hpp"
#include "polylab/scaling.hpp"

namespace polylab::polymer {

// Point-to-point polymer partition function at inverse temperature beta over
// the directed paths of lpp.hpp:
//   Zbar(n,m) = sum_paths exp(beta * H(path)),
// H the path energy (origin excluded). `normalized` divides by the path
// count, i.e. averages exp(beta H) over uniform paths. All arithmetic stays
// in the log domain.
struct LogWeight {
    double log_value;
};

LogWeight log_partition(const env::EnvField& field, std::int64_t n, std::int64_t m, double beta,
                        bool normalized = true);
LogWeight log_partition(const env::DenseField& field, std::int64_t n, std::int64_t m, double beta,
                        bool normalized = true);

LogWeight log_partition_d(const env::EnvField& field, const lpp::Endpoint& end, double beta,
                          bool normalized = true);

// Free-energy estimator in the thin-rectangle window: endpoints
// M_k = floor(alpha_k n^a), inverse temperature beta_n = beta n^{(a-1)/2}.
// Matching the lattice sum to its Brownian limit requires recentering by the
// path-entropy term sum_k M_k log(n / M_k):
//   [ log Zbar_{beta_n}(n, M) - sum_k M_k log(n / M_k) ] / (beta_n n^{(1+a)/2}).
// For d = 1, alpha = 1 this tends to f(beta)/beta with f as in
// `free_energy_exact`; for d >= 2 the rescaled limit exists but has no known
// closed form, so only stabilization across n can be checked.
double mo_regime_estimate(const env::DistSpec& dist, std::int64_t n, double a, double beta,
                          const std::vector<double>& alphas = {1.0});

// Closed form for the Brownian point-to-point free energy
//   f(beta) = m* beta^2 - Psi(m*) - 2 log beta,   Psi'(m*) = beta^2,
// with Psi the digamma function; m* minimizes the convex map
// m |-> m beta^2 - Psi(m) over m > 0. Requires beta > 0. Limits worth
// knowing: f(beta) -> 1 as beta -> 0+, and f(beta) = 2 beta - 2 log beta
// + gamma_E + o(1) as beta -> inf.
double free_energy_exact(double beta);

} // namespace polylab::polymer
