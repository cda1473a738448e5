#include "pathmc/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace pathmc {

// Nodes are the roots of P_n, found by Newton iteration from the Chebyshev
// initial guess; weights w_i = 2 / ((1 - x_i^2) P_n'(x_i)^2).
QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (double(i) + 0.75) / (double(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // evaluate P_n and P_n' by the three-term recurrence
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / double(k);
                p0 = p1;
                p1 = p2;
            }
            dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return rule;
}

QuadratureRule gauss_legendre(int n, double a, double b) {
    QuadratureRule rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        rule.nodes[i] = mid + half * rule.nodes[i];
        rule.weights[i] *= half;
    }
    return rule;
}

// Physicists' Gauss-Hermite (weight e^{-x^2}), rescaled so the rule
// integrates against the standard normal density with unit total weight.
QuadratureRule gauss_hermite_prob(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite_prob: n >= 1 required");
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int m = (n + 1) / 2;
    const double pim4 = 0.7511255444649425; // pi^{-1/4}
    double x = 0.0;
    for (int i = 0; i < m; ++i) {
        // initial guesses from Numerical-Recipes-style asymptotics
        if (i == 0)
            x = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            x -= 1.14 * std::pow(double(n), 0.426) / x;
        else if (i == 2)
            x = 1.86 * x - 0.86 * rule.nodes[static_cast<std::size_t>(n - 1)];
        else if (i == 3)
            x = 1.91 * x - 0.91 * rule.nodes[static_cast<std::size_t>(n - 2)];
        else
            x = 2.0 * x - rule.nodes[static_cast<std::size_t>(n - i + 1)];
        double dp = 0.0;
        for (int iter = 0; iter < 200; ++iter) {
            double p0 = pim4, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = x * std::sqrt(2.0 / (k + 1.0)) * p1 - std::sqrt(double(k) / (k + 1.0)) * p2;
            }
            dp = std::sqrt(2.0 * n) * p1;
            const double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / (dp * dp);
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.weights[static_cast<std::size_t>(i)] = w;
    }
    // rescale: \int f dN(0,1) = (1/sqrt(pi)) sum w_i f(sqrt(2) x_i)
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        rule.nodes[i] *= std::sqrt(2.0);
        rule.weights[i] *= inv_sqrt_pi;
    }
    return rule;
}

} // namespace pathmc
