#include "polylab/special.hpp"

#include <cmath>

#include "polylab/errors.hpp"

namespace polylab::special {

double digamma(double x) {
    if (!(x > 0.0)) throw numeric_error("digamma: requires x > 0");
    double acc = 0.0;
    while (x < 6.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x, inv2 = inv * inv;
    // log x - 1/(2x) - 1/(12x^2) + 1/(120x^4) - 1/(252x^6)
    double s = std::log(x) - 0.5 * inv;
    s -= inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0)));
    return acc + s;
}

double trigamma(double x) {
    if (!(x > 0.0)) throw numeric_error("trigamma: requires x > 0");
    double acc = 0.0;
    while (x < 6.0) {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x, inv2 = inv * inv;
    // 1/x + 1/(2x^2) + 1/(6x^3) - 1/(30x^5) + 1/(42x^7)
    double s = inv + 0.5 * inv2;
    s += inv * inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0)));
    return acc + s;
}

double trigamma_inverse(double y) {
    if (!(y > 0.0)) throw numeric_error("trigamma_inverse: requires y > 0");
    // trigamma(m) ~ 1/m^2 (m->0) and ~ 1/m (m->inf): bracket generously.
    double lo = std::log(1.0 / (std::sqrt(y) + y) * 0.25);
    double hi = std::log((1.0 / std::sqrt(y) + 1.0 / y) * 4.0);
    if (!(trigamma(std::exp(lo)) > y) || !(trigamma(std::exp(hi)) < y))
        throw numeric_error("trigamma_inverse: bracket failed");
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        (trigamma(std::exp(mid)) > y ? lo : hi) = mid;
    }
    if (hi - lo > 1e-12) throw numeric_error("trigamma_inverse: no convergence");
    return std::exp(0.5 * (lo + hi));
}

} // namespace polylab::special
