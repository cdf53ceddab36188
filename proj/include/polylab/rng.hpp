#pragma once

#include <cstdint>
#include <cmath>
#include <span>

namespace polylab::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// SplitMix64 finalizer: full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Key a (seed, coordinate...) tuple to one well-mixed 64-bit word. Each
// coordinate is folded with a distinct odd multiplier so permuting coordinates
// changes the key. Pure function: the basis of counter-based field access.
inline std::uint64_t key_coords(std::uint64_t seed, std::span<const std::int64_t> coords) {
    std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ull);
    for (std::size_t k = 0; k < coords.size(); ++k) {
        h = mix64(h ^ (static_cast<std::uint64_t>(coords[k]) + kGolden * (k + 1)));
    }
    return h;
}

inline std::uint64_t key2(std::uint64_t seed, std::int64_t i, std::int64_t j) {
    std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ull);
    h = mix64(h ^ (static_cast<std::uint64_t>(i) + kGolden));
    h = mix64(h ^ (static_cast<std::uint64_t>(j) + kGolden * 2));
    return h;
}

// Map a 64-bit word to the open interval (0,1); never returns 0 or 1.
// 52 input bits: (m + 0.5) 2^-52 with m < 2^52 stays strictly inside and
// round-trips exactly (the 53-bit variant rounds its top value up to 1.0).
inline double to_unit(std::uint64_t w) {
    return (static_cast<double>(w >> 12) + 0.5) * 0x1.0p-52;
}

// Deterministic per-replicate seed schedule: documented mixing of the master
// seed with the replicate index (index 0 = master stream itself is avoided so
// that replicate streams never collide with ad-hoc uses of the master seed).
inline std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ (kGolden * (index + 1)));
}

// Small sequential generator for places where a stream (not random access) is
// the natural shape: per-line Brownian increments, matrix sampling.
struct Stream {
    std::uint64_t state;
    explicit Stream(std::uint64_t seed) : state(seed) {}
    std::uint64_t next_u64() {
        state += kGolden;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double next_unit() { return to_unit(next_u64()); }
};

// Standard normal CDF via erfc; accurate in both tails.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0x1.6a09e667f3bcdp-1); // x / sqrt(2)
}

double normal_quantile(double p);          // AS241-class inverse normal CDF
double normal_from_key(std::uint64_t w);   // quantile transform of to_unit(w)

// One N(0,1) draw from a sequential stream.
inline double next_normal(Stream& s) { return normal_from_key(s.next_u64()); }

// Gamma(shape,1) sampler (Marsaglia-Tsang), shape >= 0.5; consumes a variable
// number of stream words, so only meaningful on sequential streams.
double gamma_sample(Stream& s, double shape);

// chi_k = sqrt(chi^2_k); chi^2_k / 2 ~ Gamma(k/2, 1).
inline double chi_sample(Stream& s, double dof) {
    return std::sqrt(2.0 * gamma_sample(s, 0.5 * dof));
}

} // namespace polylab::rng
