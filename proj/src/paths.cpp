#include "pathmc/paths.hpp"

#include <cmath>

#include "pathmc/jacobi.hpp"
#include "pathmc/quadrature.hpp"

namespace pathmc {

GeodesicPath develop(const Manifold& m, const DrivingPath& b, bool extend_past_injectivity) {
    if (b.d != m.dim())
        throw std::invalid_argument("develop: driving path dimension does not match manifold");
    const int n = b.segments();
    const int ad = m.ambient_dim();

    GeodesicPath sigma{b.partition, &m, Mat(ad, n + 1), {}, b};
    sigma.frames.reserve(static_cast<std::size_t>(n) + 1);
    sigma.vertices.col(0) = m.base_point();
    sigma.frames.push_back(m.base_frame());

    const double inj = m.injectivity_radius();
    for (int i = 0; i < n; ++i) {
        const Vec db = b.increments.col(i);
        if (!extend_past_injectivity && db.norm() >= inj)
            throw DevelopmentRangeError("develop: segment increment reaches the injectivity radius");
        const Mat& u = sigma.frames.back();
        const Vec x = sigma.vertices.col(i);
        const Vec v = u * db;
        sigma.vertices.col(i + 1) = m.exp_map(x, v);
        Mat u_next(ad, m.dim());
        for (int a = 0; a < m.dim(); ++a) u_next.col(a) = m.transport(x, v, u.col(a));
        mgs_orthonormalize(u_next);
        sigma.frames.push_back(std::move(u_next));
    }
    return sigma;
}

DrivingPath antidevelop(const GeodesicPath& sigma) {
    const Manifold& m = *sigma.manifold;
    const int n = sigma.segments();
    Mat incs(m.dim(), n);
    for (int i = 0; i < n; ++i) {
        const Vec v = m.log_map(sigma.vertex(i), sigma.vertex(i + 1));
        incs.col(i) = sigma.frames[static_cast<std::size_t>(i)].transpose() * v;
    }
    return DrivingPath(sigma.partition, std::move(incs));
}

double energy(const DrivingPath& b) { return b.energy(); }
double energy(const GeodesicPath& sigma) { return sigma.driving.energy(); }

double e_p_vertices(const Manifold& m, const Partition& p, const std::vector<Vec>& x) {
    if (int(x.size()) != p.segments())
        throw std::invalid_argument("e_p_vertices: expected one vertex per partition segment");
    double e = 0.0;
    Vec prev = m.base_point();
    for (int i = 0; i < p.segments(); ++i) {
        const double dist = m.log_map(prev, x[static_cast<std::size_t>(i)]).norm();
        e += dist * dist / p.dt(i);
        prev = x[static_cast<std::size_t>(i)];
    }
    return e;
}

// ---------------------------------------------------------------------------
// Tangents

PathTangent PathTangent::from_kicks(const GeodesicPath& sigma, const Mat& kicks) {
    const Manifold& m = *sigma.manifold;
    const int n = sigma.segments();
    const int d = m.dim();
    if (kicks.rows() != d || kicks.cols() != n)
        throw std::invalid_argument("PathTangent: kicks must be d x n");
    Mat values = Mat::Zero(d, n + 1);
    for (int i = 0; i < n; ++i) {
        const SegmentJacobi sj =
            segment_jacobi(m, sigma.frame_at(i), sigma.driving.increments.col(i), sigma.partition.dt(i));
        values.col(i + 1) = sj.C * values.col(i) + sj.Z * kicks.col(i);
    }
    return PathTangent(&sigma, std::move(values), kicks);
}

Vec PathTangent::value_at(int segment, double s) const {
    const GeodesicPath& sigma = *base_;
    const double s0 = sigma.partition.time(segment);
    const double ds = sigma.partition.dt(segment);
    const double t = s - s0;
    if (t < 0.0 || t > ds + 1e-12)
        throw std::invalid_argument("PathTangent::value_at: time outside segment");
    if (t <= 0.0) return values_.col(segment);
    const SegmentJacobi sj = segment_jacobi(*sigma.manifold, sigma.frame_at(segment),
                                            sigma.driving.increments.col(segment), ds, t);
    return sj.C * values_.col(segment) + sj.Z * kicks_.col(segment);
}

Frame frame_along(const GeodesicPath& sigma, int segment, double s) {
    const Manifold& m = *sigma.manifold;
    const double s0 = sigma.partition.time(segment);
    const double ds = sigma.partition.dt(segment);
    const double t = s - s0;
    if (t < -1e-12 || t > ds + 1e-12)
        throw std::invalid_argument("frame_along: time outside segment");
    const Vec x = sigma.vertex(segment);
    const Mat& u = sigma.frames[static_cast<std::size_t>(segment)];
    if (t <= 0.0) return Frame{x, u};
    // partial geodesic: scale the segment velocity by t/ds
    const Vec v = u * sigma.driving.increments.col(segment) * (t / ds);
    Frame out;
    out.point = m.exp_map(x, v);
    out.basis.resize(u.rows(), u.cols());
    for (int a = 0; a < u.cols(); ++a) out.basis.col(a) = m.transport(x, v, u.col(a));
    mgs_orthonormalize(out.basis);
    return out;
}

// ---------------------------------------------------------------------------
// q-form calculus

namespace {

// integral of Omega_{u(r)}(b', h(r)) dr over [s0, s0 + t] inside `segment`,
// where h is the Jacobi solution with value h_start and slope `kick` at the
// segment start
Mat q_partial(const GeodesicPath& sigma, int segment, double t, const QuadratureRule& gauss,
              const Vec& h_start, const Vec& kick) {
    const Manifold& m = *sigma.manifold;
    const int d = m.dim();
    Mat acc = Mat::Zero(d, d);
    if (t <= 0.0) return acc;
    const double s0 = sigma.partition.time(segment);
    const double ds = sigma.partition.dt(segment);
    const Vec bprime = sigma.driving.increments.col(segment) / ds;
    for (std::size_t k = 0; k < gauss.nodes.size(); ++k) {
        const double r = s0 + 0.5 * t * (gauss.nodes[k] + 1.0);
        const double w = 0.5 * t * gauss.weights[k];
        const Frame u = frame_along(sigma, segment, r);
        const SegmentJacobi sj = segment_jacobi(m, sigma.frame_at(segment),
                                                sigma.driving.increments.col(segment), ds, r - s0);
        const Vec h = sj.C * h_start + sj.Z * kick;
        acc += w * m.curvature_omega(u, bprime, h);
    }
    return acc;
}

} // namespace

Mat q_form(const GeodesicPath& sigma, const PathTangent& X, double s, int gauss_order) {
    if (X.base() != &sigma)
        throw std::domain_error("q_form: tangent does not live over this path");
    if (s < 0.0 || s > 1.0 + 1e-12) throw std::invalid_argument("q_form: s must be in [0,1]");
    const Manifold& m = *sigma.manifold;
    const int d = m.dim();
    const QuadratureRule gauss = gauss_legendre(gauss_order);
    Mat q = Mat::Zero(d, d);
    for (int i = 0; i < sigma.segments(); ++i) {
        const double s0 = sigma.partition.time(i);
        const double s1 = sigma.partition.time(i + 1);
        if (s <= s0) break;
        const double t = std::min(s, s1) - s0;
        q += q_partial(sigma, i, t, gauss, X.value(i), X.kick(i));
    }
    return q;
}

std::vector<Vec> pullback_differential(const GeodesicPath& sigma, const PathTangent& X,
                                       int gauss_order) {
    if (X.base() != &sigma)
        throw std::domain_error("pullback_differential: tangent does not live over this path");
    const Manifold& m = *sigma.manifold;
    const int d = m.dim();
    const int n = sigma.segments();
    const QuadratureRule gauss = gauss_legendre(gauss_order);

    std::vector<Vec> out(static_cast<std::size_t>(n) + 1, Vec::Zero(d));
    Mat q_base = Mat::Zero(d, d); // q at the current segment start
    Vec integral = Vec::Zero(d);  // int_0^{s_i} q_r(X) b'(r) dr
    for (int i = 0; i < n; ++i) {
        const double s0 = sigma.partition.time(i);
        const double ds = sigma.partition.dt(i);
        const Vec bprime = sigma.driving.increments.col(i) / ds;
        // outer Gauss rule in r over the segment; the inner integral
        // q_r - q_{s_{i-1}} is evaluated by the same rule on [s0, r]
        for (std::size_t k = 0; k < gauss.nodes.size(); ++k) {
            const double r = s0 + 0.5 * ds * (gauss.nodes[k] + 1.0);
            const double w = 0.5 * ds * gauss.weights[k];
            const Mat q_r = q_base + q_partial(sigma, i, r - s0, gauss, X.value(i), X.kick(i));
            integral += w * (q_r * bprime);
        }
        q_base += q_partial(sigma, i, ds, gauss, X.value(i), X.kick(i));
        out[static_cast<std::size_t>(i) + 1] = X.value(i + 1) - integral;
    }
    return out;
}

PathTangent develop_tangent(const GeodesicPath& sigma, const DrivingPath& eta, int gauss_order) {
    if (!(eta.partition == sigma.partition) || eta.d != sigma.manifold->dim())
        throw std::invalid_argument("develop_tangent: perturbation does not match the path");
    const Manifold& m = *sigma.manifold;
    const int d = m.dim();
    const int n = sigma.segments();
    const QuadratureRule gauss = gauss_legendre(gauss_order);

    Mat kicks(d, n);
    Vec h = Vec::Zero(d);
    Mat q = Mat::Zero(d, d);
    for (int i = 0; i < n; ++i) {
        const double ds = sigma.partition.dt(i);
        const Vec bprime = sigma.driving.increments.col(i) / ds;
        kicks.col(i) = eta.increments.col(i) / ds + q * bprime;
        const SegmentJacobi sj =
            segment_jacobi(m, sigma.frame_at(i), sigma.driving.increments.col(i), ds);
        const Vec h_next = sj.C * h + sj.Z * kicks.col(i);
        q += q_partial(sigma, i, ds, gauss, h, kicks.col(i));
        h = h_next;
    }
    return PathTangent::from_kicks(sigma, kicks);
}

} // namespace pathmc
