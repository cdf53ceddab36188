#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polylab/rng.hpp"

namespace polylab::env {

// Site distributions. All are centered with unit variance so that every
// scaling limit in the toolkit applies with constant 1.
enum class DistKind { gaussian, rademacher, centered_exponential, centered_uniform };

struct DistSpec {
    DistKind kind = DistKind::gaussian;
    std::uint64_t seed = 0;
};

DistKind parse_kind(const std::string& name); // throws std::invalid_argument
std::string kind_name(DistKind kind);
DistSpec make_dist(const std::string& kind, std::uint64_t seed);

// log E[exp(beta * eta)] in closed form.
//   gaussian:             beta^2/2
//   rademacher:           log cosh(beta)
//   centered_exponential: -beta - log(1-beta)      (finite only for beta < 1)
//   centered_uniform:     log( sinh(beta*sqrt(3)) / (beta*sqrt(3)) )
// Throws std::domain_error outside the finiteness range. The range is *not*
// enforced at sampling time: fields exist for every beta, only the MGF blows up.
double log_mgf(const DistSpec& dist, double beta);

// Quantile transform of one well-mixed uniform; pure in (kind, word).
double sample_from_key(DistKind kind, std::uint64_t word);

// Lazy disorder field on a box {0..shape[0]-1} x ... x {0..shape[d]-1}.
// Values are a pure function of (seed, kind, coordinate): any row, plane or
// single site can be materialized independently and in any order, and two
// fields with equal (seed, kind) agree wherever their shapes overlap.
class EnvField {
  public:
    EnvField(DistSpec dist, std::vector<std::int64_t> shape);

    double at(std::span<const std::int64_t> coords) const {
        check_coords(coords);
        return sample_from_key(dist_.kind, rng::key_coords(dist_.seed, coords));
    }
    // Hot-path access for planar sweeps; identical value to at({i,j}).
    double at2(std::int64_t i, std::int64_t j) const {
        return sample_from_key(dist_.kind, rng::key2(dist_.seed, i, j));
    }

    const DistSpec& dist() const { return dist_; }
    const std::vector<std::int64_t>& shape() const { return shape_; }
    std::size_t dim() const { return shape_.size(); }
    std::int64_t extent(std::size_t k) const { return shape_[k]; }

  private:
    void check_coords(std::span<const std::int64_t> coords) const;

    DistSpec dist_;
    std::vector<std::int64_t> shape_;
};

// Materialized field with the same access surface; used by tests to build
// literal configurations and perturbed copies.
class DenseField {
  public:
    DenseField(std::vector<std::int64_t> shape, std::vector<double> values);
    static DenseField from(const EnvField& f); // copy a lazy field (small shapes)

    double at(std::span<const std::int64_t> coords) const { return values_[offset(coords)]; }
    double at2(std::int64_t i, std::int64_t j) const {
        return values_[static_cast<std::size_t>(i) * static_cast<std::size_t>(shape_[1]) +
                       static_cast<std::size_t>(j)];
    }
    double& ref(std::span<const std::int64_t> coords) { return values_[offset(coords)]; }

    const std::vector<std::int64_t>& shape() const { return shape_; }
    std::size_t dim() const { return shape_.size(); }
    std::int64_t extent(std::size_t k) const { return shape_[k]; }

  private:
    std::size_t offset(std::span<const std::int64_t> coords) const;

    std::vector<std::int64_t> shape_;
    std::vector<double> values_;
};

} // namespace polylab::env
