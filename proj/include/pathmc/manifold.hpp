#pragma once

#include <memory>
#include <optional>
#include <string>

#include "pathmc/errors.hpp"
#include "pathmc/types.hpp"

namespace pathmc {

// Orthonormal frame at a point: the columns of `basis` are d tangent vectors
// at `point` (in ambient coordinates), so basis maps R^d isometrically onto
// the tangent space.
struct Frame {
    Vec point;
    Mat basis; // ambient_dim x dim, orthonormal columns
};

// Riemannian manifold with a distinguished base point o and base frame u0.
// Points and tangent vectors live in ambient coordinates (R^d itself for
// flat space, R^{d+1} for the embedded unit sphere).
class Manifold {
public:
    virtual ~Manifold() = default;

    virtual int dim() const = 0;
    virtual int ambient_dim() const = 0;
    virtual double injectivity_radius() const = 0;
    virtual Vec base_point() const = 0;
    virtual Mat base_frame() const = 0;
    virtual std::string name() const = 0;

    // Endpoint of the geodesic with gamma(0) = x, gamma'(0) = v.
    // Throws std::domain_error if v is not tangent at x.
    virtual Vec exp_map(const Vec& x, const Vec& v) const = 0;

    // Inverse of exp_map: returns v with exp_map(x, v) = y and |v| = d(x, y).
    // Throws CutLocusError when d(x, y) reaches the injectivity radius.
    virtual Vec log_map(const Vec& x, const Vec& y) const = 0;

    // Parallel transport of w along s -> exp_map(x, s * dir) from s=0 to s=1.
    virtual Vec transport(const Vec& x, const Vec& dir, const Vec& w) const = 0;

    // Matrix of c -> u^{-1} R(ua, ub) u c in the frame u; antisymmetric.
    virtual Mat curvature_omega(const Frame& u, const Vec& a, const Vec& b) const = 0;

    // Matrix of u^{-1} Ric u; symmetric.
    virtual Mat ricci_frame(const Frame& u) const = 0;

    // Scalar curvature at x.
    virtual double scalar(const Vec& x) const = 0;

    // Geodesic distance; on the sphere this is arccos<x,y>, defined globally
    // (cut locus included), which is what the heat kernel needs.
    virtual double distance(const Vec& x, const Vec& y) const = 0;

    // Orthogonal projection of an ambient vector onto the tangent space at x.
    virtual Vec project_tangent(const Vec& x, const Vec& w) const = 0;

    // Constant sectional curvature if the model has one (0 flat, +1 unit
    // sphere); nullopt forces numerical integration of the Jacobi systems.
    virtual std::optional<double> constant_curvature() const = 0;

    // Ambient ODE data for the numerically integrated backend:
    // geodesics solve x'' = geodesic_acceleration(x, x'), and a field w is
    // parallel along x(s) iff w' = transport_rate(x, x', w).
    virtual Vec geodesic_acceleration(const Vec& x, const Vec& v) const = 0;
    virtual Vec transport_rate(const Vec& x, const Vec& xdot, const Vec& w) const = 0;

    Frame base() const { return Frame{base_point(), base_frame()}; }
};

// Flat R^d with the standard inner product, o = 0.
class FlatSpace final : public Manifold {
public:
    explicit FlatSpace(int d);

    int dim() const override { return d_; }
    int ambient_dim() const override { return d_; }
    double injectivity_radius() const override;
    Vec base_point() const override;
    Mat base_frame() const override;
    std::string name() const override;

    Vec exp_map(const Vec& x, const Vec& v) const override;
    Vec log_map(const Vec& x, const Vec& y) const override;
    Vec transport(const Vec& x, const Vec& dir, const Vec& w) const override;
    Mat curvature_omega(const Frame& u, const Vec& a, const Vec& b) const override;
    Mat ricci_frame(const Frame& u) const override;
    double scalar(const Vec& x) const override;
    double distance(const Vec& x, const Vec& y) const override;
    Vec project_tangent(const Vec& x, const Vec& w) const override;
    std::optional<double> constant_curvature() const override { return 0.0; }
    Vec geodesic_acceleration(const Vec& x, const Vec& v) const override;
    Vec transport_rate(const Vec& x, const Vec& xdot, const Vec& w) const override;

private:
    int d_;
};

// Round unit sphere S^d embedded in R^{d+1}; o is the "north pole" e_{d+1}
// and the base frame is (e_1, ..., e_d). Injectivity radius pi.
class Sphere final : public Manifold {
public:
    explicit Sphere(int d);

    int dim() const override { return d_; }
    int ambient_dim() const override { return d_ + 1; }
    double injectivity_radius() const override { return M_PI; }
    Vec base_point() const override;
    Mat base_frame() const override;
    std::string name() const override;

    Vec exp_map(const Vec& x, const Vec& v) const override;
    Vec log_map(const Vec& x, const Vec& y) const override;
    Vec transport(const Vec& x, const Vec& dir, const Vec& w) const override;
    Mat curvature_omega(const Frame& u, const Vec& a, const Vec& b) const override;
    Mat ricci_frame(const Frame& u) const override;
    double scalar(const Vec& x) const override;
    double distance(const Vec& x, const Vec& y) const override;
    Vec project_tangent(const Vec& x, const Vec& w) const override;
    std::optional<double> constant_curvature() const override { return 1.0; }
    Vec geodesic_acceleration(const Vec& x, const Vec& v) const override;
    Vec transport_rate(const Vec& x, const Vec& xdot, const Vec& w) const override;

private:
    void require_tangent(const Vec& x, const Vec& v, const char* op) const;
    int d_;
};

// Numerically integrated backend: wraps a model and replaces exp/log/
// transport with RK4 integration of the ambient geodesic, parallel-transport
// and frame-bundle equations. Curvature data is delegated. Used as an oracle
// against the closed forms; `step` is the integration step in path parameter.
class IntegratedManifold final : public Manifold {
public:
    IntegratedManifold(const Manifold& base, double step = 1e-3);

    int dim() const override { return base_->dim(); }
    int ambient_dim() const override { return base_->ambient_dim(); }
    double injectivity_radius() const override { return base_->injectivity_radius(); }
    Vec base_point() const override { return base_->base_point(); }
    Mat base_frame() const override { return base_->base_frame(); }
    std::string name() const override { return base_->name() + "-rk4"; }

    Vec exp_map(const Vec& x, const Vec& v) const override;
    Vec log_map(const Vec& x, const Vec& y) const override;
    Vec transport(const Vec& x, const Vec& dir, const Vec& w) const override;
    Mat curvature_omega(const Frame& u, const Vec& a, const Vec& b) const override {
        return base_->curvature_omega(u, a, b);
    }
    Mat ricci_frame(const Frame& u) const override { return base_->ricci_frame(u); }
    double scalar(const Vec& x) const override { return base_->scalar(x); }
    double distance(const Vec& x, const Vec& y) const override { return log_map(x, y).norm(); }
    Vec project_tangent(const Vec& x, const Vec& w) const override {
        return base_->project_tangent(x, w);
    }
    // the whole point of this backend is to avoid closed forms
    std::optional<double> constant_curvature() const override { return std::nullopt; }
    Vec geodesic_acceleration(const Vec& x, const Vec& v) const override {
        return base_->geodesic_acceleration(x, v);
    }
    Vec transport_rate(const Vec& x, const Vec& xdot, const Vec& w) const override {
        return base_->transport_rate(x, xdot, w);
    }

    double step() const { return step_; }

private:
    const Manifold* base_;
    double step_;
};

// In-place modified Gram-Schmidt; caps orthonormality drift after composite
// transports.
void mgs_orthonormalize(Mat& basis);

// Largest deviation of <u_a, u_b> from delta_ab over the frame columns.
double frame_orthonormality_error(const Frame& u);

// Manifold by CLI name: "flat-<d>" or "sphere-<d>".
std::unique_ptr<Manifold> make_manifold(const std::string& name);

} // namespace pathmc
