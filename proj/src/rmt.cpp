#include "polylab/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "polylab/errors.hpp"

namespace polylab::rmt {

Tridiag sample_gue_tridiag(rng::Stream& s, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("sample_gue_tridiag: n must be >= 1");
    Tridiag t;
    t.diag.resize(static_cast<std::size_t>(n));
    t.off.resize(static_cast<std::size_t>(n - 1));
    for (auto& d : t.diag) d = rng::next_normal(s);
    for (std::int64_t i = 0; i < n - 1; ++i)
        t.off[static_cast<std::size_t>(i)] =
            std::sqrt(rng::gamma_sample(s, static_cast<double>(n - 1 - i)));
    return t;
}

namespace {

// eigenvalues strictly below x, by the sign count of the LDL^T pivots
std::int64_t count_below(const Tridiag& t, const std::vector<double>& bsq, double x) {
    std::int64_t cnt = 0;
    double d = t.diag[0] - x;
    if (d < 0.0) ++cnt;
    for (std::size_t i = 1; i < t.diag.size(); ++i) {
        if (d == 0.0) d = -1e-300; // graze: nudge off the pole, count unaffected
        d = t.diag[i] - x - bsq[i - 1] / d;
        if (d < 0.0) ++cnt;
    }
    return cnt;
}

} // namespace

double top_eigenvalue(const Tridiag& t) {
    const auto n = static_cast<std::int64_t>(t.diag.size());
    if (n == 0) throw std::invalid_argument("top_eigenvalue: empty matrix");
    std::vector<double> bsq(t.off.size());
    for (std::size_t i = 0; i < t.off.size(); ++i) bsq[i] = t.off[i] * t.off[i];
    double lo = t.diag[0], hi = t.diag[0];
    for (std::size_t i = 0; i < t.diag.size(); ++i) {
        lo = std::max(lo, t.diag[i]); // Rayleigh quotient of a basis vector
        const double l = (i > 0) ? std::fabs(t.off[i - 1]) : 0.0;
        const double r = (i + 1 < t.diag.size()) ? std::fabs(t.off[i]) : 0.0;
        hi = std::max(hi, t.diag[i] + l + r); // Gershgorin
    }
    hi += 1e-8;
    const double scale = std::max({1.0, std::fabs(lo), std::fabs(hi)});
    for (int it = 0; it < 200 && hi - lo > 1e-11 * scale; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(t, bsq, mid) == n)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double sample_gue_top(rng::Stream& s, std::int64_t n) {
    return top_eigenvalue(sample_gue_tridiag(s, n));
}

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double airy_ai(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("airy_ai: positive argument required");
    const long double lx = x;
    const long double z = (2.0L / 3.0L) * lx * std::sqrt(lx);
    return static_cast<double>(std::sqrt(lx / 3.0L) / kPi * std::cyl_bessel_kl(1.0L / 3.0L, z));
}

double airy_ai_prime(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("airy_ai_prime: positive argument required");
    const long double lx = x;
    const long double z = (2.0L / 3.0L) * lx * std::sqrt(lx);
    return static_cast<double>(-lx / std::sqrt(3.0L) / kPi *
                               std::cyl_bessel_kl(2.0L / 3.0L, z));
}

namespace {

struct PState {
    long double u, p, v, i;
};

PState rhs(long double x, const PState& y) {
    return {y.p, 2.0L * y.u * y.u * y.u + x * y.u, -y.u * y.u, -y.v};
}

PState axpy(const PState& y, long double h, const PState& k) {
    return {y.u + h * k.u, y.p + h * k.p, y.v + h * k.v, y.i + h * k.i};
}

} // namespace

void TwTable::integrate(double tol) {
    // Cash-Karp embedded 4(5) pair, stepping downward from x0 to smin.
    static const long double a[6][5] = {
        {0, 0, 0, 0, 0},
        {1.0L / 5, 0, 0, 0, 0},
        {3.0L / 40, 9.0L / 40, 0, 0, 0},
        {3.0L / 10, -9.0L / 10, 6.0L / 5, 0, 0},
        {-11.0L / 54, 5.0L / 2, -70.0L / 27, 35.0L / 27, 0},
        {1631.0L / 55296, 175.0L / 512, 575.0L / 13824, 44275.0L / 110592, 253.0L / 4096}};
    static const long double b5[6] = {37.0L / 378,  0, 250.0L / 621,
                                      125.0L / 594, 0, 512.0L / 1771};
    static const long double b4[6] = {2825.0L / 27648, 0,           18575.0L / 48384,
                                      13525.0L / 55296, 277.0L / 14336, 1.0L / 4};

    const long double x0 = x0_;
    const long double u0 = airy_ai(static_cast<double>(x0));
    const long double p0 = airy_ai_prime(static_cast<double>(x0));
    PState y{u0, p0, u0 * u0 / (2.0L * std::sqrt(x0)), u0 * u0 / (4.0L * x0)};
    long double x = x0;

    auto push = [&](long double xx, const PState& yy) {
        s_.push_back(static_cast<double>(xx));
        iint_.push_back(static_cast<double>(yy.i));
        v_.push_back(static_cast<double>(yy.v));
        u_.push_back(static_cast<double>(yy.u));
        up_.push_back(static_cast<double>(yy.p));
    };
    push(x, y);

    long double h = -1e-3;
    const long double hmax = 0.02, hmin = 1e-10;
    const long double target = smin_;
    while (x > target) {
        if (x + h < target) h = target - x;
        PState k[6];
        k[0] = rhs(x, y);
        for (int st = 1; st < 6; ++st) {
            PState yy = y;
            for (int j = 0; j < st; ++j) yy = axpy(yy, h * a[st][j], k[j]);
            static const long double c[6] = {0, 1.0L / 5, 3.0L / 10, 3.0L / 5, 1, 7.0L / 8};
            k[st] = rhs(x + c[st] * h, yy);
        }
        PState y5 = y, y4 = y;
        for (int st = 0; st < 6; ++st) {
            y5 = axpy(y5, h * b5[st], k[st]);
            y4 = axpy(y4, h * b4[st], k[st]);
        }
        // Relative error control. An additive atol floor would admit absolute
        // errors of size tol into u while u ~ Ai(x) ~ 1e-10 on the right half;
        // relative to the solution those are huge, they ride the Airy branch
        // down to x = 0, and the backward instability then amplifies them by
        // ~exp((2 sqrt 2/3)|smin|^{3/2}). No component of the Hastings-McLeod
        // system crosses zero, so pure relative scaling is safe.
        auto comp = [&](long double e, long double ref) {
            return std::fabs(e) / (tol * (std::fabs(ref) + 1e-300L));
        };
        const long double err =
            std::max({comp(y5.u - y4.u, y.u), comp(y5.p - y4.p, y.p), comp(y5.v - y4.v, y.v),
                      comp(y5.i - y4.i, y.i)});
        if (err <= 1.0L || std::fabs(h) <= hmin) {
            x += h;
            y = y5;
            push(x, y);
        }
        long double fac = (err > 0.0L) ? 0.9L * std::pow(err, -0.2L) : 5.0L;
        fac = std::min(5.0L, std::max(0.2L, fac));
        h *= fac;
        if (-h > hmax) h = -hmax;
        if (-h < hmin) h = -hmin;
    }
    std::reverse(s_.begin(), s_.end());
    std::reverse(iint_.begin(), iint_.end());
    std::reverse(v_.begin(), v_.end());
    std::reverse(u_.begin(), u_.end());
    std::reverse(up_.begin(), up_.end());
}

std::size_t TwTable::locate(double s) const {
    // segment index k with s_[k] <= s <= s_[k+1]
    const auto it = std::upper_bound(s_.begin(), s_.end(), s);
    if (it == s_.begin()) return 0;
    std::size_t k = static_cast<std::size_t>(it - s_.begin()) - 1;
    if (k + 1 >= s_.size()) k = s_.size() - 2;
    return k;
}

namespace {

// cubic Hermite value at t in [0,1] on a segment of width h
double hermite(double y0, double y1, double d0, double d1, double h, double t) {
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
           (t3 - t2) * h * d1;
}

} // namespace

double TwTable::log_cdf(double s) const {
    if (s <= s_.front()) s = s_.front(); // clamp: mass below is ~e^{-|s|^3/12}
    if (s >= s_.back()) {
        const double u = airy_ai(s);
        return -(u * u) / (4.0 * s);
    }
    const std::size_t k = locate(s);
    const double h = s_[k + 1] - s_[k];
    const double t = (s - s_[k]) / h;
    const double ii = hermite(iint_[k], iint_[k + 1], -v_[k], -v_[k + 1], h, t);
    return -ii;
}

double TwTable::cdf(double s) const { return std::exp(log_cdf(s)); }

double TwTable::log_upper_tail(double s) const {
    const double l = log_cdf(s);
    // log(1 - e^l); l < 0 always
    return std::log(-std::expm1(l));
}

double TwTable::pdf(double s) const {
    if (s <= s_.front()) return v_.front() * std::exp(-iint_.front());
    double v;
    if (s >= s_.back()) {
        const double u = airy_ai(s);
        v = u * u / (2.0 * std::sqrt(s));
    } else {
        const std::size_t k = locate(s);
        const double h = s_[k + 1] - s_[k];
        const double t = (s - s_[k]) / h;
        v = hermite(v_[k], v_[k + 1], -u_[k] * u_[k], -u_[k + 1] * u_[k + 1], h, t);
    }
    return v * cdf(s);
}

void TwTable::moments() {
    // Simpson over the stored range; tail mass outside is < 1e-20
    const int n = 16384; // even
    const double lo = s_.front(), hi = s_.back();
    const double h = (hi - lo) / n;
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double s = lo + i * h;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        const double p = pdf(s);
        m1 += w * s * p;
        m2 += w * s * s * p;
    }
    m1 *= h / 3.0;
    m2 *= h / 3.0;
    mean_ = m1;
    var_ = m2 - m1 * m1;
}

std::shared_ptr<const TwTable> TwTable::build(double smin, double smax, double tol) {
    if (!(smin < smax) || smax > 8.0 || smin < -15.0)
        throw std::invalid_argument("TwTable: need -15 <= smin < smax <= 8");
    if (!(tol >= 1e-18 && tol <= 1e-4))
        throw std::invalid_argument("TwTable: tol in [1e-18, 1e-4]");
    auto t = std::shared_ptr<TwTable>(new TwTable());
    t->smin_ = smin;
    t->smax_ = smax;
    t->x0_ = 10.0;
    t->integrate(tol);
    t->moments();
    return t;
}

const TwTable& TwTable::standard() {
    // Backward integration is unstable: a local error injected near x = 0
    // grows by exp((2 sqrt 2 / 3)|s|^{3/2}) (~9e12 at s = -10) by the time it
    // reaches the left end. Extended precision plus a 1e-17 step tolerance
    // keeps the amplified error in I(-10) near 1e-4; double precision or lax
    // tolerances visibly corrupt the left tail while leaving the bulk intact.
    static std::shared_ptr<const TwTable> table = build(-10.0, 6.0, 1e-17);
    return *table;
}

double tw_cdf(double s) { return TwTable::standard().cdf(s); }

} // namespace polylab::rmt
