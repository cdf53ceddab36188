#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "polylab/errors.hpp"
#include "polylab/logsum.hpp"

namespace polylab::lpp {

// Directed lattice paths from the origin to `end`, unit steps along coordinate
// axes; path energy is the sum of site values excluding the origin. The
// passage time T maximizes energy over paths:
//   T(i,j) = eta(i,j) + max(T(i-1,j), T(i,j-1)),  T(0,...,0) = 0,
// with -inf for neighbors outside the box.

using Endpoint = std::vector<std::int64_t>;

inline void check_endpoint_2d(std::int64_t n, std::int64_t m, std::int64_t e0, std::int64_t e1) {
    if (n < 0 || m < 0) throw std::invalid_argument("endpoint coordinates must be >= 0");
    if (n >= e0 || m >= e1) throw std::out_of_range("endpoint outside field shape");
}

// Planar passage time; memory O(min(n,m)), one row resident and updated in
// place. `flip` transposes the sweep so the resident row runs along the
// smaller coordinate.
template <class Field>
double passage_time(const Field& field, std::int64_t n, std::int64_t m) {
    if (field.dim() != 2) throw std::invalid_argument("passage_time: planar field required");
    check_endpoint_2d(n, m, field.extent(0), field.extent(1));
    const bool flip = (m > n);
    const std::int64_t outer = flip ? m : n;
    const std::int64_t inner = flip ? n : m;
    auto eta = [&](std::int64_t o, std::int64_t i) {
        return flip ? field.at2(i, o) : field.at2(o, i);
    };
    std::vector<double> row(static_cast<std::size_t>(inner) + 1);
    row[0] = 0.0;
    for (std::int64_t j = 1; j <= inner; ++j) row[j] = row[j - 1] + eta(0, j);
    for (std::int64_t o = 1; o <= outer; ++o) {
        row[0] += eta(o, 0);
        for (std::int64_t j = 1; j <= inner; ++j) {
            const double best = (row[j] > row[j - 1]) ? row[j] : row[j - 1];
            row[j] = eta(o, j) + best;
        }
    }
    return row[static_cast<std::size_t>(inner)];
}

// Passage time to an endpoint in any dimension >= 1. Sweeps the first
// coordinate; keeps one plane over the remaining coordinates, updated in
// lexicographic order so all same-plane predecessors are already final.
template <class Field>
double passage_time_d(const Field& field, const Endpoint& end) {
    if (end.size() != field.dim())
        throw std::invalid_argument("passage_time_d: endpoint arity mismatch");
    if (end.empty()) throw std::invalid_argument("passage_time_d: empty endpoint");
    for (std::size_t k = 0; k < end.size(); ++k) {
        if (end[k] < 0) throw std::invalid_argument("endpoint coordinates must be >= 0");
        if (end[k] >= field.extent(k)) throw std::out_of_range("endpoint outside field shape");
    }
    const std::size_t d = end.size() - 1;
    std::size_t plane = 1;
    std::vector<std::size_t> stride(d);
    for (std::size_t k = d; k-- > 0;) {
        stride[k] = plane;
        plane *= static_cast<std::size_t>(end[k + 1] + 1);
    }
    std::vector<double> t(plane, kNegInf);
    std::vector<std::int64_t> c(end.size(), 0);
    for (std::int64_t x0 = 0; x0 <= end[0]; ++x0) {
        c[0] = x0;
        for (std::size_t k = 1; k <= d; ++k) c[k] = 0;
        for (std::size_t idx = 0; idx < plane; ++idx) {
            double best = t[idx]; // predecessor along the swept coordinate
            for (std::size_t k = 0; k < d; ++k)
                if (c[k + 1] > 0 && t[idx - stride[k]] > best) best = t[idx - stride[k]];
            if (x0 == 0 && idx == 0) {
                t[0] = 0.0;
            } else {
                t[idx] = (best == kNegInf) ? kNegInf : field.at(c) + best;
            }
            for (std::size_t k = d; k-- > 0;) {
                if (++c[k + 1] <= end[k + 1]) break;
                c[k + 1] = 0;
            }
        }
    }
    return t[plane - 1];
}

// All anti-diagonal passage times T(n, n_total - n) for n = 1..n_total in a
// single triangular sweep; both field extents must be >= n_total + 1.
template <class Field>
std::vector<double> passage_profile(const Field& field, std::int64_t n_total) {
    if (field.dim() != 2) throw std::invalid_argument("passage_profile: planar field required");
    if (n_total < 1) throw std::invalid_argument("passage_profile: n_total must be >= 1");
    if (field.extent(0) <= n_total || field.extent(1) <= n_total)
        throw std::out_of_range("passage_profile: field does not cover the triangle");
    std::vector<double> row(static_cast<std::size_t>(n_total) + 1);
    std::vector<double> profile(static_cast<std::size_t>(n_total) + 1, kNegInf);
    row[0] = 0.0;
    for (std::int64_t j = 1; j <= n_total; ++j) row[j] = row[j - 1] + field.at2(0, j);
    for (std::int64_t i = 1; i <= n_total; ++i) {
        const std::int64_t jmax = n_total - i;
        row[0] += field.at2(i, 0);
        for (std::int64_t j = 1; j <= jmax; ++j) {
            const double best = (row[j] > row[j - 1]) ? row[j] : row[j - 1];
            row[j] = field.at2(i, j) + best;
        }
        profile[static_cast<std::size_t>(i)] = row[static_cast<std::size_t>(jmax)];
    }
    return profile; // profile[0] unused, kept -inf
}

// Exhaustive maximum over all directed paths; the independent cross-check for
// the DP routes. Declines when the path count exceeds 1e6.
template <class Field>
double passage_time_bruteforce(const Field& field, const Endpoint& end) {
    if (end.size() != field.dim())
        throw std::invalid_argument("passage_time_bruteforce: endpoint arity mismatch");
    for (std::size_t k = 0; k < end.size(); ++k) {
        if (end[k] < 0) throw std::invalid_argument("endpoint coordinates must be >= 0");
        if (end[k] >= field.extent(k)) throw std::out_of_range("endpoint outside field shape");
    }
    std::vector<std::int64_t> parts(end.begin(), end.end());
    if (log_multinomial(parts) > std::log(1e6))
        throw refusal_error("passage_time_bruteforce: more than 1e6 paths");
    double best = kNegInf;
    std::vector<std::int64_t> c(end.size(), 0);
    std::function<void(double)> dfs = [&](double energy) {
        bool at_end = true;
        for (std::size_t k = 0; k < end.size(); ++k)
            if (c[k] != end[k]) { at_end = false; break; }
        if (at_end) {
            if (energy > best) best = energy;
            return;
        }
        for (std::size_t k = 0; k < end.size(); ++k) {
            if (c[k] < end[k]) {
                ++c[k];
                dfs(energy + field.at(c));
                --c[k];
            }
        }
    };
    dfs(0.0);
    return best;
}

// log |paths to (n,m)| = log C(n+m, m); used by tests and the free-energy
// sandwich.
inline double log_path_count(std::int64_t n, std::int64_t m) { return log_binomial(n + m, m); }

} // namespace polylab::lpp
