#pragma once

#include <optional>

#include "pathmc/manifold.hpp"
#include "pathmc/types.hpp"

namespace pathmc {

// Curvature-corrected short-time kernel
//   Q_s(x,y) = (2 pi s)^{-d/2} exp(-d^2(x,y)/(2s) + kappa s (Scal(x)+Scal(y))).
// kappa = 1/12 reproduces the scalar-curvature correction; the 0, 1/6, 1/8
// variants exist for the correction-constant comparison.
double q_kernel(const Manifold& m, const Vec& x, const Vec& y, double s, double kappa = 1.0 / 12.0);

// Quadrature grid plus the dense kernel matrix K[i][j] = Q_s(x_i, x_j) w_j.
struct HeatKernelGrid {
    const Manifold* manifold = nullptr;
    Mat nodes;   // ambient_dim x N
    Vec weights; // N, positive, summing to Vol(M) (or the box volume)
    Mat kernel;  // N x N
    double s = 0.0;
    double kappa = 1.0 / 12.0;

    int size() const { return int(weights.size()); }
};

// Sphere grid: Gauss-Legendre nodes in cos(colatitude) x uniform longitude,
// an exact product rule for the round measure (sum of weights = 4 pi on S^2).
// Only S^2 is gridded; other manifolds need the flat builder.
HeatKernelGrid build_grid(const Manifold& m, int res_theta, int res_phi, double s,
                          double kappa = 1.0 / 12.0);

// Flat grid on a truncation box [-half_width, half_width]^d (d <= 2) with
// Gauss-Legendre nodes per axis. A missing/invalid half_width is a
// configuration error: flat space cannot be gridded unbounded.
HeatKernelGrid build_flat_grid(const Manifold& m, int res_per_axis, double s, double half_width,
                               double kappa = 1.0 / 12.0);

// Half-width covering all but ~1e-8 of the Gaussian mass at total time s.
double flat_box_half_width(double s_total);

// n-fold Euler iteration (Q_{s/n})^n F on the grid; the grid must have been
// built with step s_total / n.
Vec q_iterate(const HeatKernelGrid& grid, const Vec& f_nodes, int n, double s_total);

// Reference semigroup e^{(s/2) Laplacian} on the grid nodes: exact Gaussian
// convolution on flat space, spherical-harmonic expansion of the heat kernel
// on S^2 (series truncated once the tail factor drops below 1e-14).
Vec reference_heat(const HeatKernelGrid& grid, const Vec& f_nodes, double s);

} // namespace pathmc
