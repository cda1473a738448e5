#pragma once

#include <cmath>
#include <random>

#include "pathmc/manifold.hpp"
#include "pathmc/paths.hpp"
#include "pathmc/rng.hpp"
#include "pathmc/types.hpp"

namespace pathmc::testing {

// deterministic mt19937 helpers for test inputs (not the library streams)
inline std::mt19937_64 test_rng(std::uint64_t seed = 12345) { return std::mt19937_64(seed); }

inline Vec random_unit(std::mt19937_64& gen, int n) {
    std::normal_distribution<double> g;
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = g(gen);
    v.normalize();
    return v;
}

inline Vec random_vec(std::mt19937_64& gen, int n, double scale = 1.0) {
    std::normal_distribution<double> g;
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = scale * g(gen);
    return v;
}

// random point on the sphere plus an adapted orthonormal frame
inline Frame random_sphere_frame(const Manifold& m, std::mt19937_64& gen) {
    Vec x = random_unit(gen, m.ambient_dim());
    Mat basis(m.ambient_dim(), m.dim());
    for (int a = 0; a < m.dim(); ++a) {
        Vec t = m.project_tangent(x, random_vec(gen, m.ambient_dim()));
        for (int c = 0; c < a; ++c) t -= basis.col(c).dot(t) * basis.col(c);
        basis.col(a) = t.normalized();
    }
    return Frame{x, basis};
}

// random driving path with increments of size about `scale`
inline DrivingPath random_driving(const Partition& p, int d, std::mt19937_64& gen,
                                  double scale = 0.3) {
    DrivingPath b(p, d);
    std::normal_distribution<double> g;
    for (int i = 0; i < p.segments(); ++i)
        for (int a = 0; a < d; ++a) b.increments(a, i) = scale * std::sqrt(p.dt(i)) * g(gen);
    return b;
}

// Curvature by finite-difference holonomy: parallel transport around the
// small geodesic quadrilateral (+eps a, +eps b, -eps a, -eps b, close),
// which satisfies hol = I - eps^2 Omega_u(a, b) + O(eps^3).
inline Mat holonomy_curvature(const Manifold& m, const Frame& u, const Vec& a, const Vec& b,
                              double eps = 1e-3) {
    const int d = m.dim();
    Mat L(d, d);
    for (int c = 0; c < d; ++c) {
        Vec w = u.basis.col(c);
        Vec A = eps * (u.basis * a);
        Vec B = eps * (u.basis * b);
        Vec p = u.point;
        auto leg = [&](Vec dir, std::initializer_list<Vec*> carry) { // dir by value: may alias carry
            for (Vec* v : carry) *v = m.transport(p, dir, *v);
            p = m.exp_map(p, dir);
        };
        leg(A, {&w, &B, &A});
        leg(B, {&w, &A, &B});
        Vec negA = -A;
        leg(negA, {&w, &B});
        Vec negB = -B;
        leg(negB, {&w});
        const Vec back = m.log_map(p, u.point);
        w = m.transport(p, back, w);
        L.col(c) = u.basis.transpose() * (w - u.basis.col(c)) / (eps * eps);
    }
    return -L;
}

// P(chi^2_d <= x), closed form for d <= 4 (all the tests need)
inline double chi2_cdf(double x, int d) {
    if (x <= 0.0) return 0.0;
    switch (d) {
        case 1: return std::erf(std::sqrt(0.5 * x));
        case 2: return 1.0 - std::exp(-0.5 * x);
        case 3:
            return std::erf(std::sqrt(0.5 * x)) -
                   std::sqrt(2.0 / M_PI) * std::sqrt(x) * std::exp(-0.5 * x);
        case 4: return 1.0 - (1.0 + 0.5 * x) * std::exp(-0.5 * x);
        default: throw std::invalid_argument("chi2_cdf: d out of supported range");
    }
}

} // namespace pathmc::testing
