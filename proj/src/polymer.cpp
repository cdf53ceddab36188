#include "polylab/polymer.hpp"

#include <cmath>
#include <stdexcept>

#include "polylab/logsum.hpp"
#include "polylab/special.hpp"

namespace polylab::polymer {

namespace {

// Planar log-domain analogue of lpp::passage_time: max becomes log-sum-exp.
template <class Field>
double log_partition_planar(const Field& field, std::int64_t n, std::int64_t m, double beta) {
    if (field.dim() != 2) throw std::invalid_argument("log_partition: planar field required");
    lpp::check_endpoint_2d(n, m, field.extent(0), field.extent(1));
    const bool flip = (m > n);
    const std::int64_t outer = flip ? m : n;
    const std::int64_t inner = flip ? n : m;
    auto eta = [&](std::int64_t o, std::int64_t i) {
        return flip ? field.at2(i, o) : field.at2(o, i);
    };
    std::vector<double> row(static_cast<std::size_t>(inner) + 1);
    row[0] = 0.0;
    for (std::int64_t j = 1; j <= inner; ++j) row[j] = row[j - 1] + beta * eta(0, j);
    for (std::int64_t o = 1; o <= outer; ++o) {
        row[0] += beta * eta(o, 0);
        for (std::int64_t j = 1; j <= inner; ++j)
            row[j] = beta * eta(o, j) + log_sum_exp(row[j], row[j - 1]);
    }
    const double out = row[static_cast<std::size_t>(inner)];
    if (std::isnan(out)) throw numeric_error("log_partition: NaN in recursion");
    return out;
}

double normalizer(std::int64_t n, std::int64_t m) { return log_binomial(n + m, m); }

} // namespace

LogWeight log_partition(const env::EnvField& field, std::int64_t n, std::int64_t m, double beta,
                        bool normalized) {
    double v = log_partition_planar(field, n, m, beta);
    if (normalized) v -= normalizer(n, m);
    return {v};
}

LogWeight log_partition(const env::DenseField& field, std::int64_t n, std::int64_t m, double beta,
                        bool normalized) {
    double v = log_partition_planar(field, n, m, beta);
    if (normalized) v -= normalizer(n, m);
    return {v};
}

LogWeight log_partition_d(const env::EnvField& field, const lpp::Endpoint& end, double beta,
                          bool normalized) {
    if (end.size() != field.dim())
        throw std::invalid_argument("log_partition_d: endpoint arity mismatch");
    if (end.empty()) throw std::invalid_argument("log_partition_d: empty endpoint");
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
    std::vector<double> z(plane, kNegInf);
    std::vector<std::int64_t> c(end.size(), 0);
    std::vector<double> pred(d + 1);
    for (std::int64_t x0 = 0; x0 <= end[0]; ++x0) {
        c[0] = x0;
        for (std::size_t k = 1; k <= d; ++k) c[k] = 0;
        for (std::size_t idx = 0; idx < plane; ++idx) {
            if (x0 == 0 && idx == 0) {
                z[0] = 0.0;
            } else {
                pred.clear();
                if (z[idx] != kNegInf) pred.push_back(z[idx]);
                for (std::size_t k = 0; k < d; ++k)
                    if (c[k + 1] > 0) pred.push_back(z[idx - stride[k]]);
                z[idx] = beta * field.at(c) + log_sum_exp(std::span<const double>(pred));
            }
            for (std::size_t k = d; k-- > 0;) {
                if (++c[k + 1] <= end[k + 1]) break;
                c[k + 1] = 0;
            }
        }
    }
    double v = z[plane - 1];
    if (std::isnan(v)) throw numeric_error("log_partition_d: NaN in recursion");
    if (normalized) {
        std::vector<std::int64_t> parts(end.begin(), end.end());
        v -= log_multinomial(parts);
    }
    return {v};
}

double mo_regime_estimate(const env::DistSpec& dist, std::int64_t n, double a, double beta,
                          const std::vector<double>& alphas) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("mo_regime_estimate: need 0 < a < 1");
    if (!(beta > 0.0)) throw std::invalid_argument("mo_regime_estimate: need beta > 0");
    if (n < 2) throw std::invalid_argument("mo_regime_estimate: need n >= 2");
    if (alphas.empty()) throw std::invalid_argument("mo_regime_estimate: need at least one alpha");
    lpp::Endpoint end;
    end.push_back(n);
    std::vector<std::int64_t> shape{n + 1};
    for (double alpha : alphas) {
        if (!(alpha > 0.0)) throw std::invalid_argument("mo_regime_estimate: alphas must be > 0");
        const auto mk = static_cast<std::int64_t>(std::floor(alpha * std::pow(double(n), a)));
        if (mk < 1) throw std::invalid_argument("mo_regime_estimate: n too small for this regime");
        end.push_back(mk);
        shape.push_back(mk + 1);
    }
    const double beta_n = beta * std::pow(double(n), (a - 1.0) / 2.0);
    env::EnvField field(dist, shape);
    double logz;
    if (end.size() == 2) {
        logz = log_partition(field, end[0], end[1], beta_n, false).log_value;
    } else {
        logz = log_partition_d(field, end, beta_n, false).log_value;
    }
    double recenter = 0.0;
    for (std::size_t k = 1; k < end.size(); ++k)
        recenter += double(end[k]) * std::log(double(n) / double(end[k]));
    return (logz - recenter) / (beta_n * std::pow(double(n), (1.0 + a) / 2.0));
}

double free_energy_exact(double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("free_energy_exact: need beta > 0");
    const double mstar = special::trigamma_inverse(beta * beta);
    return mstar * beta * beta - special::digamma(mstar) - 2.0 * std::log(beta);
}

} // namespace polylab::polymer
