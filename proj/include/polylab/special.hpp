#pragma once

namespace polylab::special {

// Digamma and trigamma on (0, inf): recurrence shift into x >= 6, then the
// Bernoulli asymptotic series with remainder terms through x^-6. Absolute
// accuracy ~1e-9, ample for the free-energy closed form and its tests.
double digamma(double x);
double trigamma(double x);

// Unique root m* > 0 of trigamma(m*) = y for y > 0 (trigamma is strictly
// decreasing from +inf to 0). Bisection on log m to relative width 1e-13.
double trigamma_inverse(double y);

} // namespace polylab::special
