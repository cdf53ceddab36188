#include "polylab/drift.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "polylab/errors.hpp"
#include "polylab/logsum.hpp"
#include "polylab/rng.hpp"

namespace polylab::drift {

namespace {

void check_regime(const ScalingRegime& r) {
    if (!(r.a > 0.0 && r.a < 1.0)) throw std::invalid_argument("drift: need 0 < a < 1");
    if (!(r.beta >= 0.0)) throw std::invalid_argument("drift: need beta >= 0");
    if (!(r.gamma > 0.0)) throw std::invalid_argument("drift: need gamma > 0");
}

} // namespace

std::int64_t truncation_width(std::int64_t n_total, const ScalingRegime& regime) {
    check_regime(regime);
    if (n_total < 1) throw std::invalid_argument("truncation_width: n_total >= 1");
    const double w = std::ceil(std::pow(double(n_total), 0.5 * (1.0 + regime.a) + 0.1));
    return std::min<std::int64_t>(n_total - 1, static_cast<std::int64_t>(w));
}

namespace {

template <class Field, class Weight>
DriftResult drifted_impl(const Field& field, std::int64_t n_total, const ScalingRegime& regime,
                         Weight weight) {
    check_regime(regime);
    if (n_total < 1) throw std::invalid_argument("drifted_log_partition: n_total >= 1");
    const std::int64_t w = truncation_width(n_total, regime);
    if (field.dim() != 2 || field.extent(0) <= n_total || field.extent(1) <= w)
        throw std::invalid_argument("drifted_log_partition: field must cover the strip");
    const double beta = regime.beta;
    const double h = regime.h_n(double(n_total));

    // The strip is swept in linear space with the tilt folded into the
    // running weights: y[j] = exp(z(i,j) - h j - off). Only a narrow corridor
    // of endpoints survives the tilt, so cells far from it may underflow to
    // zero; they sit hundreds of e-folds below the corridor and never feed a
    // surviving capture. A per-row rescale of `off` keeps the corridor
    // representable.
    const double eh = std::exp(-h);
    std::vector<double> y(static_cast<std::size_t>(w) + 1);
    double off = 0.0;
    {
        // first row in log space: a pure product of e^{-h} factors would
        // underflow before the offset is established
        std::vector<double> ylog(y.size());
        ylog[0] = 0.0; // empty path at the origin, which carries no energy
        for (std::size_t j = 1; j < ylog.size(); ++j)
            ylog[j] = ylog[j - 1] + beta * field.at2(0, std::int64_t(j)) - h;
        off = *std::max_element(ylog.begin(), ylog.end());
        for (std::size_t j = 0; j < y.size(); ++j) y[j] = std::exp(ylog[j] - off);
    }

    LogSumAcc acc;
    double best = kNegInf;
    std::int64_t best_n = 1;
    for (std::int64_t i = 1; i <= n_total; ++i) {
        const std::int64_t jmax = std::min(w, n_total - i);
        y[0] *= weight(field.at2(i, 0));
        double rowmax = y[0];
        for (std::int64_t j = 1; j <= jmax; ++j) {
            const std::size_t s = static_cast<std::size_t>(j);
            y[s] = weight(field.at2(i, j)) * (y[s] + eh * y[s - 1]);
            if (y[s] > rowmax) rowmax = y[s];
        }
        const std::int64_t jstar = n_total - i; // endpoint (i, N - i)
        if (jstar <= w && y[static_cast<std::size_t>(jstar)] > 0.0) {
            const double term = std::log(y[static_cast<std::size_t>(jstar)]) + off;
            acc.add(term);
            if (term > best) {
                best = term;
                best_n = i;
            }
        }
        if (rowmax > 1e200 || (rowmax > 0.0 && rowmax < 1e-200)) {
            const double s = 1.0 / rowmax;
            for (std::int64_t j = 0; j <= jmax; ++j) y[static_cast<std::size_t>(j)] *= s;
            off += std::log(rowmax);
        }
    }

    DriftResult out;
    out.n_total = n_total;
    out.regime = regime;
    out.log_z = polymer::LogWeight{acc.value()};
    out.argmax_n = best_n;
    out.predictor = laplace_predictor(n_total, regime).value;
    if (std::isnan(out.log_z.log_value))
        throw numeric_error("drifted_log_partition: sum degenerated to NaN");
    return out;
}

} // namespace

DriftResult drifted_log_partition(const env::EnvField& field, std::int64_t n_total,
                                  const ScalingRegime& regime) {
    const double beta = regime.beta;
    if (field.dist().kind == env::DistKind::rademacher) {
        // two-valued environment: the weight is one of two constants, so the
        // per-cell exp can be a table lookup
        const std::array<double, 2> w{std::exp(-beta), std::exp(beta)};
        return drifted_impl(field, n_total, regime,
                            [w](double eta) { return w[eta > 0.0]; });
    }
    return drifted_impl(field, n_total, regime,
                        [beta](double eta) { return std::exp(beta * eta); });
}

DriftResult drifted_log_partition(const env::DenseField& field, std::int64_t n_total,
                                  const ScalingRegime& regime) {
    const double beta = regime.beta;
    return drifted_impl(field, n_total, regime,
                        [beta](double eta) { return std::exp(beta * eta); });
}

DriftResult drifted_log_partition(const env::DistSpec& dist, std::int64_t n_total,
                                  const ScalingRegime& regime) {
    const std::int64_t w = truncation_width(n_total, regime);
    const env::EnvField field(dist, {n_total + 1, w + 1});
    return drifted_log_partition(field, n_total, regime);
}

LaplacePrediction laplace_predictor(std::int64_t n_total, const ScalingRegime& regime) {
    check_regime(regime);
    if (n_total < 1) throw std::invalid_argument("laplace_predictor: n_total >= 1");
    if (regime.beta == 0.0) return {0.0, 0.0}; // boundary maximum at u = 0
    const double n = double(n_total);
    const double g = regime.h_n(n);
    const double beta = regime.beta;
    auto f = [&](double u) { return (2.0 * beta * std::sqrt(u) - g * u) / (1.0 + u); };
    // golden section on log u around the small-u maximizer (beta/g)^2
    const double center = 2.0 * std::log(beta / g);
    double lo = center - 12.0, hi = center + 12.0;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double m1 = hi - gr * (hi - lo), m2 = lo + gr * (hi - lo);
    double f1 = f(std::exp(m1)), f2 = f(std::exp(m2));
    for (int it = 0; it < 300 && hi - lo > 1e-13; ++it) {
        if (f1 < f2) {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + gr * (hi - lo);
            f2 = f(std::exp(m2));
        } else {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - gr * (hi - lo);
            f1 = f(std::exp(m1));
        }
    }
    if (hi - lo > 1e-8)
        throw numeric_error("laplace_predictor: maximizer did not localize");
    const double u = std::exp(0.5 * (lo + hi));
    return {u, n * f(u)};
}

FluctuationScan drift_fluctuations(const env::DistSpec& dist, const ScalingRegime& regime,
                                   std::span<const std::int64_t> n_values, int reps,
                                   std::uint64_t seed) {
    check_regime(regime);
    if (n_values.size() < 2)
        throw refusal_error("drift_fluctuations: need at least two sizes to regress");
    if (reps < 30) throw refusal_error("drift_fluctuations: need reps >= 30");
    const auto [mn, mx] = std::minmax_element(n_values.begin(), n_values.end());
    if (*mn < 2 || double(*mx) < 16.0 * double(*mn))
        throw refusal_error("drift_fluctuations: sizes must span at least a factor 16");

    const std::int64_t total = static_cast<std::int64_t>(n_values.size()) * reps;
    std::vector<double> logz(static_cast<std::size_t>(total));
    stats::parallel_for(total, [&](std::int64_t t) {
        const std::int64_t n = n_values[static_cast<std::size_t>(t) / std::size_t(reps)];
        const env::DistSpec d{dist.kind, rng::replicate_seed(seed, std::uint64_t(t))};
        logz[static_cast<std::size_t>(t)] =
            drifted_log_partition(d, n, regime).log_z.log_value;
    });

    FluctuationScan out;
    out.n_values.assign(n_values.begin(), n_values.end());
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < n_values.size(); ++k) {
        const double n = double(n_values[k]);
        const double center = regime.beta * regime.beta / regime.gamma *
                              std::pow(n, 0.5 * (1.0 + regime.a));
        long double m2 = 0.0L;
        const auto* row = logz.data() + k * std::size_t(reps);
        out.log_values.emplace_back(row, row + reps);
        for (int r = 0; r < reps; ++r) {
            const double d = row[std::size_t(r)] - center;
            m2 += static_cast<long double>(d) * d;
        }
        out.second_moment.push_back(double(m2 / reps));
        lx.push_back(std::log(n));
        ly.push_back(std::log(out.second_moment.back()));
    }
    out.fit = stats::ols(lx, ly);
    const auto band = stats::bootstrap_slope(lx, ly, 2000, seed ^ 0x9e3779b97f4a7c15ull);
    out.slope_lo = band.first;
    out.slope_hi = band.second;
    for (std::size_t k = 0; k < lx.size(); ++k)
        out.residuals.push_back(ly[k] - (out.fit.intercept + out.fit.slope * lx[k]));
    return out;
}

TailProfile deviation_tail_profile(const env::DistSpec& dist, const ScalingRegime& regime,
                                   std::int64_t n, int reps, std::span<const double> eps_grid,
                                   std::uint64_t seed) {
    check_regime(regime);
    if (reps < 1000)
        throw refusal_error("deviation_tail_profile: tails need reps >= 1000");
    if (eps_grid.empty()) throw std::invalid_argument("deviation_tail_profile: empty grid");
    for (double e : eps_grid)
        if (!(e >= 0.0)) throw std::invalid_argument("deviation_tail_profile: eps >= 0");

    const double center =
        regime.beta * regime.beta / regime.gamma * std::pow(double(n), 0.5 * (1.0 + regime.a));
    TailProfile out;
    out.n_total = n;
    out.deviations.resize(static_cast<std::size_t>(reps));
    stats::parallel_for(reps, [&](std::int64_t t) {
        const env::DistSpec d{dist.kind, rng::replicate_seed(seed, std::uint64_t(t))};
        out.deviations[static_cast<std::size_t>(t)] =
            drifted_log_partition(d, n, regime).log_z.log_value / center - 1.0;
    });
    for (double e : eps_grid) {
        std::int64_t up = 0, down = 0;
        for (double d : out.deviations) {
            if (d >= e) ++up;
            if (d <= -e) ++down;
        }
        out.eps.push_back(e);
        out.upper_freq.push_back(double(up) / reps);
        out.lower_freq.push_back(double(down) / reps);
        out.upper_scale.push_back(std::pow(double(n), regime.a) * std::pow(e, 1.5));
        out.lower_scale.push_back(std::pow(double(n), 2.0 * regime.a) * std::pow(e, 3.0));
    }
    return out;
}

} // namespace polylab::drift
