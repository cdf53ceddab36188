#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "polylab/rng.hpp"

namespace polylab::rmt {

// Tridiagonal model of the Gaussian unitary ensemble, in the normalization
// where the diagonal is N(0,1), off-diagonal entry i (0-based, i = 0..n-2)
// is sqrt(Gamma(n-1-i, 1)), and the spectrum matches a Hermitian matrix with
// unit-variance entries: top eigenvalue ~ 2 sqrt(n) with n^{-1/6}
// fluctuations. Draw order from the stream: n diagonal normals, then the
// n-1 off-diagonal gammas.
struct Tridiag {
    std::vector<double> diag;
    std::vector<double> off;
};

Tridiag sample_gue_tridiag(rng::Stream& s, std::int64_t n);

// Largest eigenvalue by Sturm-count bisection; absolute accuracy ~1e-10
// relative to the spectral scale.
double top_eigenvalue(const Tridiag& t);

double sample_gue_top(rng::Stream& s, std::int64_t n);

// Ai(x) and Ai'(x) for x > 0 through the modified Bessel representation
//   Ai(x) = sqrt(x/3)/pi K_{1/3}(z),  Ai'(x) = -(x/sqrt(3))/pi K_{2/3}(z),
// z = (2/3) x^{3/2}. Accurate to ~1e-13; used to seed the distribution table
// and continue its right tail.
double airy_ai(double x);
double airy_ai_prime(double x);

// Cumulative distribution of the top-eigenvalue fluctuation limit (the
// beta = 2 Tracy-Widom law), via the Painleve II representation
//   F(s) = exp( -int_s^inf (x-s) u(x)^2 dx ),
//   u'' = 2u^3 + xu,  u ~ Ai at +inf.
// The defining system (u, u', v = int_s u^2, I = int_s (x-s) u^2) is
// integrated once from x0 = 10 down to smin with an adaptive embedded
// Runge-Kutta pair in extended precision; queries interpolate the stored
// nodes with cubic Hermite polynomials (I' = -v, v' = -u^2). Outside the
// table the right tail continues with the Airy asymptotic I ~ Ai(s)^2/(4s)
// and the left end clamps.
class TwTable {
  public:
    // tol: local error target per accepted step. Requires smin < smax <= 8.
    // Note the backward instability: local errors reach the left end
    // amplified by ~exp((2 sqrt 2/3)|smin|^{3/2}), so deep-tail accuracy
    // needs tol far below the double rounding level; the bulk is insensitive.
    static std::shared_ptr<const TwTable> build(double smin, double smax, double tol);
    static const TwTable& standard(); // [-10, 6] at tol 1e-17, cached

    double cdf(double s) const;
    double log_cdf(double s) const;     // -I(s), exact deep into the left tail
    double log_upper_tail(double s) const; // log(1 - F(s)) without cancellation
    double pdf(double s) const;
    double mean() const { return mean_; }
    double variance() const { return var_; }
    double smin() const { return smin_; }
    double smax() const { return smax_; }

  private:
    TwTable() = default;
    void integrate(double tol);
    void moments();
    std::size_t locate(double s) const;

    double smin_ = 0.0, smax_ = 0.0, x0_ = 0.0;
    double mean_ = 0.0, var_ = 0.0;
    // ascending nodes with everything needed for Hermite evaluation
    std::vector<double> s_, iint_, v_, u_, up_;
};

// F(s) from the standard table; the workhorse for one-sample distribution
// distances.
double tw_cdf(double s);

} // namespace polylab::rmt
