#include "polylab/env.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace polylab::env {

namespace {
constexpr double kSqrt3 = 1.7320508075688772;
} // namespace

DistKind parse_kind(const std::string& name) {
    if (name == "gaussian") return DistKind::gaussian;
    if (name == "rademacher") return DistKind::rademacher;
    if (name == "centered_exponential") return DistKind::centered_exponential;
    if (name == "centered_uniform") return DistKind::centered_uniform;
    throw std::invalid_argument("unknown distribution kind: " + name);
}

std::string kind_name(DistKind kind) {
    switch (kind) {
        case DistKind::gaussian: return "gaussian";
        case DistKind::rademacher: return "rademacher";
        case DistKind::centered_exponential: return "centered_exponential";
        case DistKind::centered_uniform: return "centered_uniform";
    }
    return "?";
}

DistSpec make_dist(const std::string& kind, std::uint64_t seed) {
    return DistSpec{parse_kind(kind), seed};
}

double log_mgf(const DistSpec& dist, double beta) {
    switch (dist.kind) {
        case DistKind::gaussian:
            return 0.5 * beta * beta;
        case DistKind::rademacher: {
            // log cosh, overflow-free for large |beta|
            const double a = std::fabs(beta);
            return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
        }
        case DistKind::centered_exponential:
            if (beta >= 1.0)
                throw std::domain_error("log_mgf: centered_exponential requires beta < 1");
            return -beta - std::log1p(-beta);
        case DistKind::centered_uniform: {
            const double x = beta * kSqrt3;
            const double ax = std::fabs(x);
            // series below 0.05: the log form loses ~1e-16/x^2 relative
            // accuracy to cancellation for small x
            if (ax < 0.05) {
                const double x2 = x * x;
                return x2 / 6.0 - x2 * x2 / 180.0 + x2 * x2 * x2 / 2835.0;
            }
            // log(sinh x / x) = |x| + log(1 - exp(-2|x|)) - log(2|x|)
            return ax + std::log(-std::expm1(-2.0 * ax)) - std::log(2.0 * ax);
        }
    }
    throw std::invalid_argument("log_mgf: bad kind");
}

double sample_from_key(DistKind kind, std::uint64_t word) {
    switch (kind) {
        case DistKind::gaussian:
            return rng::normal_from_key(word);
        case DistKind::rademacher:
            // branchless: a 50/50 data branch would mispredict half the time
            return 2.0 * double(word >> 63) - 1.0;
        case DistKind::centered_exponential:
            return -std::log1p(-rng::to_unit(word)) - 1.0;
        case DistKind::centered_uniform:
            return kSqrt3 * (2.0 * rng::to_unit(word) - 1.0);
    }
    return 0.0;
}

EnvField::EnvField(DistSpec dist, std::vector<std::int64_t> shape)
    : dist_(dist), shape_(std::move(shape)) {
    if (shape_.empty()) throw std::invalid_argument("EnvField: empty shape");
    for (std::int64_t e : shape_)
        if (e <= 0) throw std::invalid_argument("EnvField: non-positive extent");
}

void EnvField::check_coords(std::span<const std::int64_t> coords) const {
    if (coords.size() != shape_.size())
        throw std::out_of_range("EnvField: coordinate arity mismatch");
    for (std::size_t k = 0; k < coords.size(); ++k)
        if (coords[k] < 0 || coords[k] >= shape_[k])
            throw std::out_of_range("EnvField: coordinate outside shape");
}

DenseField::DenseField(std::vector<std::int64_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
    std::size_t n = 1;
    for (std::int64_t e : shape_) {
        if (e <= 0) throw std::invalid_argument("DenseField: non-positive extent");
        n *= static_cast<std::size_t>(e);
    }
    if (n != values_.size()) throw std::invalid_argument("DenseField: size mismatch");
}

DenseField DenseField::from(const EnvField& f) {
    std::size_t n = 1;
    for (std::int64_t e : f.shape()) n *= static_cast<std::size_t>(e);
    std::vector<double> vals(n);
    std::vector<std::int64_t> c(f.dim(), 0);
    for (std::size_t idx = 0; idx < n; ++idx) {
        vals[idx] = f.at(c);
        for (std::size_t k = f.dim(); k-- > 0;) {
            if (++c[k] < f.extent(k)) break;
            c[k] = 0;
        }
    }
    return DenseField(f.shape(), std::move(vals));
}

std::size_t DenseField::offset(std::span<const std::int64_t> coords) const {
    if (coords.size() != shape_.size())
        throw std::out_of_range("DenseField: coordinate arity mismatch");
    std::size_t off = 0;
    for (std::size_t k = 0; k < coords.size(); ++k) {
        if (coords[k] < 0 || coords[k] >= shape_[k])
            throw std::out_of_range("DenseField: coordinate outside shape");
        off = off * static_cast<std::size_t>(shape_[k]) + static_cast<std::size_t>(coords[k]);
    }
    return off;
}

} // namespace polylab::env
