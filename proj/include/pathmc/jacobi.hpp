#pragma once

#include <utility>
#include <vector>

#include "pathmc/manifold.hpp"
#include "pathmc/paths.hpp"
#include "pathmc/types.hpp"

namespace pathmc {

// Endpoint data of the segment Jacobi systems
//   Z'' = A(s) Z,  Z(s_{i-1}) = 0, Z'(s_{i-1}) = I
//   C'' = A(s) C,  C(s_{i-1}) = I, C'(s_{i-1}) = 0
// with A(s) = Omega_{u(s)}(Delta b / Delta s, .) Delta b / Delta s.
struct SegmentJacobi {
    Mat Z;
    Mat C;
    double ds = 0.0;
    Vec db;
};

// Solves the segment systems at an interior time t in (0, ds] (default the
// segment end). Constant-curvature models use closed forms; otherwise the
// system is integrated by RK4 with A frozen per substep at the exactly
// transported frame. `rk4_step` controls the substep size of that fallback.
SegmentJacobi segment_jacobi(const Manifold& m, const Frame& u, const Vec& db, double ds,
                             double t = -1.0, double rk4_step = 1e-3);

// rho_P and its curvature decomposition.
struct DensityReport {
    double rho = 1.0;                 // prod det(Z_{i-1}(s_i) / Delta_i s), 0 if degenerate
    std::vector<double> seg_logdets;  // per-segment log det(Z / Delta s)
    double S_P = 0.0;                 // sum Scal(sigma(s_{i-1})) Delta_i s
    double R_P = 0.0;                 // sum <Ric_{u(s_{i-1})} Delta_i b, Delta_i b>
    double W_P = 0.0;                 // log rho + R_P / 6
    bool degenerate = false;          // some segment had det(Z) <= 0 (conjugate point)
};

// Radon-Nikodym density of nu_P^0 with respect to nu_P^1 along sigma.
// Conjugate-point segments make the G^0 volume vanish; the report then
// carries rho = 0 and the degenerate flag instead of throwing, so Monte
// Carlo averages stay well defined.
DensityReport rho_p(const GeodesicPath& sigma, double rk4_step = 1e-3);

// det(I - U) by direct elimination together with
// Psi(U) = log det(I - U) + tr U; requires operator norm |U| < 1.
std::pair<double, double> psi_det(const Mat& U);

// W_P recomputed through the determinant identity: per segment,
// U = Z(s_i)/Delta_i s - I and W_P = sum(tr E + Psi(-U)) with
// E = U - (1/6) Omega_u(Delta b, .) Delta b. Serves as the independent
// cross-check of the decomposition carried by DensityReport.
double wp_from_psi(const GeodesicPath& sigma, double rk4_step = 1e-3);

// Operator (spectral) norm of a small matrix.
double operator_norm(const Mat& U);

} // namespace pathmc
