#include "pathmc/manifold.hpp"

#include <cmath>
#include <limits>

namespace pathmc {

namespace {

constexpr double kTangentTol = 1e-8;

// One RK4 step of the joint system: x'' = acc(x, v), columns of W parallel.
// W has one column per transported vector (may be empty).
struct AmbientState {
    Vec x;
    Vec v;
    Mat w;
};

AmbientState state_axpy(const AmbientState& s, double h, const AmbientState& ds) {
    return AmbientState{s.x + h * ds.x, s.v + h * ds.v, s.w + h * ds.w};
}

AmbientState derivative(const Manifold& m, const AmbientState& s) {
    AmbientState d;
    d.x = s.v;
    d.v = m.geodesic_acceleration(s.x, s.v);
    d.w.resize(s.w.rows(), s.w.cols());
    for (int c = 0; c < s.w.cols(); ++c)
        d.w.col(c) = m.transport_rate(s.x, s.v, s.w.col(c));
    return d;
}

AmbientState rk4_step(const Manifold& m, const AmbientState& s, double h) {
    const AmbientState k1 = derivative(m, s);
    const AmbientState k2 = derivative(m, state_axpy(s, 0.5 * h, k1));
    const AmbientState k3 = derivative(m, state_axpy(s, 0.5 * h, k2));
    const AmbientState k4 = derivative(m, state_axpy(s, h, k3));
    AmbientState out;
    out.x = s.x + (h / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    out.v = s.v + (h / 6.0) * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    out.w = s.w + (h / 6.0) * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
    return out;
}

AmbientState integrate_geodesic(const Manifold& m, const Vec& x, const Vec& v, Mat w, double step) {
    // unit-time geodesic with initial velocity v, carrying the columns of w;
    // the step count resolves the arc length |v|
    const double speed = v.norm();
    const int n_steps = std::max(1, int(std::ceil(speed / step)));
    const double h = 1.0 / double(n_steps);
    AmbientState s{x, v, std::move(w)};
    for (int k = 0; k < n_steps; ++k) s = rk4_step(m, s, h);
    return s;
}

} // namespace

// ---------------------------------------------------------------------------
// FlatSpace

FlatSpace::FlatSpace(int d) : d_(d) {
    if (d < 1) throw std::invalid_argument("FlatSpace: dimension must be >= 1");
}

double FlatSpace::injectivity_radius() const { return std::numeric_limits<double>::infinity(); }
Vec FlatSpace::base_point() const { return Vec::Zero(d_); }
Mat FlatSpace::base_frame() const { return Mat::Identity(d_, d_); }
std::string FlatSpace::name() const { return "flat-" + std::to_string(d_); }

Vec FlatSpace::exp_map(const Vec& x, const Vec& v) const { return x + v; }
Vec FlatSpace::log_map(const Vec& x, const Vec& y) const { return y - x; }
Vec FlatSpace::transport(const Vec&, const Vec&, const Vec& w) const { return w; }
Mat FlatSpace::curvature_omega(const Frame&, const Vec&, const Vec&) const { return Mat::Zero(d_, d_); }
Mat FlatSpace::ricci_frame(const Frame&) const { return Mat::Zero(d_, d_); }
double FlatSpace::scalar(const Vec&) const { return 0.0; }
double FlatSpace::distance(const Vec& x, const Vec& y) const { return (y - x).norm(); }
Vec FlatSpace::project_tangent(const Vec&, const Vec& w) const { return w; }
Vec FlatSpace::geodesic_acceleration(const Vec&, const Vec&) const { return Vec::Zero(d_); }
Vec FlatSpace::transport_rate(const Vec&, const Vec&, const Vec&) const { return Vec::Zero(d_); }

// ---------------------------------------------------------------------------
// Sphere

Sphere::Sphere(int d) : d_(d) {
    if (d < 1) throw std::invalid_argument("Sphere: dimension must be >= 1");
}

Vec Sphere::base_point() const {
    Vec o = Vec::Zero(d_ + 1);
    o[d_] = 1.0;
    return o;
}

Mat Sphere::base_frame() const {
    Mat u = Mat::Zero(d_ + 1, d_);
    for (int a = 0; a < d_; ++a) u(a, a) = 1.0;
    return u;
}

std::string Sphere::name() const { return "sphere-" + std::to_string(d_); }

void Sphere::require_tangent(const Vec& x, const Vec& v, const char* op) const {
    if (std::abs(x.dot(v)) > kTangentTol * std::max(1.0, v.norm()))
        throw std::domain_error(std::string(op) + ": vector is not tangent at x");
}

Vec Sphere::exp_map(const Vec& x, const Vec& v) const {
    require_tangent(x, v, "exp_map");
    const double r = v.norm();
    if (r < 1e-14) return x;
    Vec y = std::cos(r) * x + (std::sin(r) / r) * v;
    y.normalize();
    return y;
}

Vec Sphere::log_map(const Vec& x, const Vec& y) const {
    const double c = std::clamp(x.dot(y), -1.0, 1.0);
    const double theta = std::acos(c);
    if (theta >= injectivity_radius() - 1e-9)
        throw CutLocusError("log_map: points at or beyond the cut locus");
    Vec w = y - c * x;
    const double wn = w.norm();
    if (wn < 1e-15) return Vec::Zero(d_ + 1);
    return (theta / wn) * w;
}

Vec Sphere::transport(const Vec& x, const Vec& dir, const Vec& w) const {
    require_tangent(x, dir, "transport");
    require_tangent(x, w, "transport");
    const double r = dir.norm();
    if (r < 1e-14) return w;
    const Vec e = dir / r;
    const double along = w.dot(e);
    // the component along the geodesic rotates in the (x, e) plane,
    // everything orthogonal to that plane is unchanged
    return (w - along * e) + along * (std::cos(r) * e - std::sin(r) * x);
}

Mat Sphere::curvature_omega(const Frame&, const Vec& a, const Vec& b) const {
    // constant curvature +1: Omega_u(a,b)c = <b,c>a - <a,c>b, any frame u
    return a * b.transpose() - b * a.transpose();
}

Mat Sphere::ricci_frame(const Frame&) const { return double(d_ - 1) * Mat::Identity(d_, d_); }
double Sphere::scalar(const Vec&) const { return double(d_) * double(d_ - 1); }

double Sphere::distance(const Vec& x, const Vec& y) const {
    return std::acos(std::clamp(x.dot(y), -1.0, 1.0));
}

Vec Sphere::project_tangent(const Vec& x, const Vec& w) const { return w - x.dot(w) * x; }

Vec Sphere::geodesic_acceleration(const Vec& x, const Vec& v) const { return -v.squaredNorm() * x; }

Vec Sphere::transport_rate(const Vec& x, const Vec& xdot, const Vec& w) const {
    return -w.dot(xdot) * x;
}

// ---------------------------------------------------------------------------
// IntegratedManifold

IntegratedManifold::IntegratedManifold(const Manifold& base, double step)
    : base_(&base), step_(step) {
    if (!(step > 0.0)) throw std::invalid_argument("IntegratedManifold: step must be positive");
}

Vec IntegratedManifold::exp_map(const Vec& x, const Vec& v) const {
    if (v.norm() < 1e-14) return x;
    return integrate_geodesic(*base_, x, v, Mat(x.size(), 0), step_).x;
}

Vec IntegratedManifold::transport(const Vec& x, const Vec& dir, const Vec& w) const {
    if (dir.norm() < 1e-14) return w;
    Mat cols(x.size(), 1);
    cols.col(0) = w;
    AmbientState s = integrate_geodesic(*base_, x, dir, std::move(cols), step_);
    return base_->project_tangent(s.x, s.w.col(0));
}

// Gauss-Newton shooting on the frame coordinates of the initial velocity.
Vec IntegratedManifold::log_map(const Vec& x, const Vec& y) const {
    const int d = dim();
    // orthonormal tangent basis at x, from the projected ambient axes
    Mat u(ambient_dim(), d);
    {
        int col = 0;
        for (int a = 0; a < ambient_dim() && col < d; ++a) {
            Vec e = Vec::Zero(ambient_dim());
            e[a] = 1.0;
            Vec t = base_->project_tangent(x, e);
            for (int c = 0; c < col; ++c) t -= u.col(c).dot(t) * u.col(c);
            const double tn = t.norm();
            if (tn > 1e-8) u.col(col++) = t / tn;
        }
        if (col != d) throw std::runtime_error("log_map: failed to build tangent basis");
    }
    Vec c = u.transpose() * (y - x); // chordal initial guess
    const double fd = 1e-6;
    for (int iter = 0; iter < 80; ++iter) {
        const Vec r = exp_map(x, u * c) - y;
        if (r.norm() < 1e-12) break;
        Mat jac(ambient_dim(), d);
        for (int a = 0; a < d; ++a) {
            Vec cp = c, cm = c;
            cp[a] += fd;
            cm[a] -= fd;
            jac.col(a) = (exp_map(x, u * cp) - exp_map(x, u * cm)) / (2.0 * fd);
        }
        const Vec dc = jac.colPivHouseholderQr().solve(r);
        c -= dc;
        if (dc.norm() < 1e-13) break;
    }
    const Vec v = u * c;
    if (v.norm() >= injectivity_radius() - 1e-9)
        throw CutLocusError("log_map: points at or beyond the cut locus");
    if ((exp_map(x, v) - y).norm() > 1e-8)
        throw std::runtime_error("log_map: shooting did not converge");
    return v;
}

// ---------------------------------------------------------------------------

void mgs_orthonormalize(Mat& basis) {
    for (int c = 0; c < basis.cols(); ++c) {
        for (int p = 0; p < c; ++p) basis.col(c) -= basis.col(p).dot(basis.col(c)) * basis.col(p);
        basis.col(c).normalize();
    }
}

double frame_orthonormality_error(const Frame& u) {
    const Mat gram = u.basis.transpose() * u.basis;
    return (gram - Mat::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

std::unique_ptr<Manifold> make_manifold(const std::string& name) {
    const auto dash = name.rfind('-');
    if (dash != std::string::npos) {
        const std::string kind = name.substr(0, dash);
        int d = 0;
        try {
            d = std::stoi(name.substr(dash + 1));
        } catch (...) {
            d = 0;
        }
        if (d >= 1) {
            if (kind == "flat") return std::make_unique<FlatSpace>(d);
            if (kind == "sphere") return std::make_unique<Sphere>(d);
        }
    }
    throw ConfigError("unknown manifold name: '" + name + "' (expected flat-<d> or sphere-<d>)");
}

} // namespace pathmc
