#pragma once

#include <vector>

namespace pathmc {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

// Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

// Gauss-Hermite rule normalized for the standard normal density: the rule
// integrates f against N(0,1) as sum_i w_i f(x_i) with sum w_i = 1.
QuadratureRule gauss_hermite_prob(int n);

} // namespace pathmc
