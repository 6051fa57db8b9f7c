#pragma once

#include <vector>

namespace spump {

/// Gauss-Hermite rule for a standard normal weight: sum_i w_i f(x_i)
/// approximates E[f(X)], X ~ N(0, 1). Weights sum to one.
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Golub-Welsch construction. Throws std::invalid_argument for n < 1.
GaussHermiteRule gauss_hermite(int n);

}  // namespace spump
