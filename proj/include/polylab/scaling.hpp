#pragma once

#include <cmath>
#include <stdexcept>

namespace polylab {

// Intermediate-disorder window: endpoints (N, ~alpha N^a) with 0 < a < 1,
// inverse temperature beta_N = beta N^{(a-1)/2} and, for drifted sums,
// tilt h_N = gamma N^{(1-a)/2}. This is the scale at which the lattice
// partition function converges to its Brownian counterpart.
struct ScalingRegime {
    double a;
    double beta = 1.0;
    double gamma = 1.0;

    void validate() const {
        if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("ScalingRegime: need 0 < a < 1");
        if (!(beta > 0.0)) throw std::invalid_argument("ScalingRegime: need beta > 0");
        if (!(gamma > 0.0)) throw std::invalid_argument("ScalingRegime: need gamma > 0");
    }
    double beta_n(double n) const { return beta * std::pow(n, (a - 1.0) / 2.0); }
    double h_n(double n) const { return gamma * std::pow(n, (1.0 - a) / 2.0); }
    double transversal(double n) const { return std::pow(n, a); }
};

} // namespace polylab
