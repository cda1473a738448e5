#include "pathmc/jacobi.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SVD>

namespace pathmc {

namespace {

// Closed form on a constant-curvature model: A has eigenvalue 0 along the
// increment direction and -kappa |b'|^2 on the orthogonal block.
SegmentJacobi constant_curvature_segment(double kappa, int d, const Vec& db, double ds, double t) {
    SegmentJacobi sj;
    sj.ds = ds;
    sj.db = db;
    const double r = db.norm();
    if (r < 1e-14 || kappa == 0.0) {
        sj.Z = t * Mat::Identity(d, d);
        sj.C = Mat::Identity(d, d);
        return sj;
    }
    const Vec e = db / r;
    const Mat par = e * e.transpose();
    const Mat perp = Mat::Identity(d, d) - par;
    const double speed = r / ds;
    if (kappa > 0.0) {
        const double w = std::sqrt(kappa) * speed;
        const double wt = w * t;
        const double zperp = (wt > 1e-8) ? std::sin(wt) / w : t * (1.0 - wt * wt / 6.0);
        sj.Z = t * par + zperp * perp;
        sj.C = par + std::cos(wt) * perp;
    } else {
        const double w = std::sqrt(-kappa) * speed;
        const double wt = w * t;
        const double zperp = (wt > 1e-8) ? std::sinh(wt) / w : t * (1.0 + wt * wt / 6.0);
        sj.Z = t * par + zperp * perp;
        sj.C = par + std::cosh(wt) * perp;
    }
    return sj;
}

// RK4 on the linear system Y'' = A Y with A frozen per substep at the
// transported frame; used whenever no closed form is available.
SegmentJacobi integrated_segment(const Manifold& m, const Frame& u0, const Vec& db, double ds,
                                 double t, double rk4_step) {
    const int d = m.dim();
    SegmentJacobi sj;
    sj.ds = ds;
    sj.db = db;
    sj.Z = Mat::Zero(d, d);
    sj.C = Mat::Identity(d, d);
    Mat Zp = Mat::Identity(d, d);
    Mat Cp = Mat::Zero(d, d);

    const Vec bprime = db / ds;
    const int n_steps = std::max(1, int(std::ceil(t / std::min(ds, rk4_step))));
    const double h = t / double(n_steps);

    Vec x = u0.point;
    Mat basis = u0.basis;
    Vec vel = basis * bprime; // ambient geodesic velocity, constant in the frame

    for (int k = 0; k < n_steps; ++k) {
        // A(s) c = Omega_u(b', c) b'; assemble column by column
        Mat Af(d, d);
        for (int c = 0; c < d; ++c) {
            Vec ec = Vec::Zero(d);
            ec[c] = 1.0;
            Af.col(c) = m.curvature_omega(Frame{x, basis}, bprime, ec) * bprime;
        }

        auto rk4 = [&](Mat& Y, Mat& Yp) {
            const Mat k1 = Yp, k1p = Af * Y;
            const Mat k2 = Yp + 0.5 * h * k1p, k2p = Af * (Y + 0.5 * h * k1);
            const Mat k3 = Yp + 0.5 * h * k2p, k3p = Af * (Y + 0.5 * h * k2);
            const Mat k4 = Yp + h * k3p, k4p = Af * (Y + h * k3);
            Y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            Yp += (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        };
        rk4(sj.Z, Zp);
        rk4(sj.C, Cp);

        // advance the point, the velocity and the frame along the geodesic
        const Vec stepv = h * vel;
        const Vec x_next = m.exp_map(x, stepv);
        Mat basis_next(basis.rows(), basis.cols());
        for (int a = 0; a < d; ++a) basis_next.col(a) = m.transport(x, stepv, basis.col(a));
        mgs_orthonormalize(basis_next);
        vel = m.transport(x, stepv, vel);
        x = x_next;
        basis = std::move(basis_next);
    }
    return sj;
}

} // namespace

SegmentJacobi segment_jacobi(const Manifold& m, const Frame& u, const Vec& db, double ds, double t,
                             double rk4_step) {
    if (!(ds > 0.0)) throw std::invalid_argument("segment_jacobi: ds must be positive");
    if (t < 0.0) t = ds;
    if (t <= 0.0 || t > ds + 1e-12)
        throw std::invalid_argument("segment_jacobi: eval time outside (0, ds]");
    if (auto kappa = m.constant_curvature())
        return constant_curvature_segment(*kappa, m.dim(), db, ds, t);
    return integrated_segment(m, u, db, ds, t, rk4_step);
}

DensityReport rho_p(const GeodesicPath& sigma, double rk4_step) {
    const Manifold& m = *sigma.manifold;
    const int n = sigma.segments();
    DensityReport rep;
    rep.seg_logdets.reserve(static_cast<std::size_t>(n));
    double sum_logdet = 0.0;
    for (int i = 0; i < n; ++i) {
        const double ds = sigma.partition.dt(i);
        const Vec db = sigma.driving.increments.col(i);
        const Frame u = sigma.frame_at(i);
        const SegmentJacobi sj = segment_jacobi(m, u, db, ds, ds, rk4_step);
        const double det = (sj.Z / ds).determinant();
        if (det <= 0.0) {
            rep.degenerate = true;
            rep.seg_logdets.push_back(-std::numeric_limits<double>::infinity());
        } else {
            rep.seg_logdets.push_back(std::log(det));
            sum_logdet += rep.seg_logdets.back();
        }
        rep.R_P += db.dot(m.ricci_frame(u) * db);
        rep.S_P += m.scalar(sigma.vertex(i)) * ds;
    }
    if (rep.degenerate) {
        rep.rho = 0.0;
        rep.W_P = -std::numeric_limits<double>::infinity();
    } else {
        rep.rho = std::exp(sum_logdet);
        rep.W_P = sum_logdet + rep.R_P / 6.0;
    }
    return rep;
}

double operator_norm(const Mat& U) {
    if (U.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(U);
    return svd.singularValues()(0);
}

std::pair<double, double> psi_det(const Mat& U) {
    if (U.rows() != U.cols()) throw std::invalid_argument("psi_det: square matrix required");
    if (operator_norm(U) >= 1.0)
        throw std::domain_error("psi_det: operator norm must be < 1");
    const Mat ImU = Mat::Identity(U.rows(), U.cols()) - U;
    const double det = ImU.determinant();
    if (!(det > 0.0)) throw std::runtime_error("psi_det: nonpositive determinant with |U| < 1");
    return {det, std::log(det) + U.trace()};
}

double wp_from_psi(const GeodesicPath& sigma, double rk4_step) {
    const Manifold& m = *sigma.manifold;
    double w = 0.0;
    for (int i = 0; i < sigma.segments(); ++i) {
        const double ds = sigma.partition.dt(i);
        const Vec db = sigma.driving.increments.col(i);
        const Frame u = sigma.frame_at(i);
        const SegmentJacobi sj = segment_jacobi(m, u, db, ds, ds, rk4_step);
        const Mat U = sj.Z / ds - Mat::Identity(m.dim(), m.dim());
        const double r_seg = db.dot(m.ricci_frame(u) * db);
        const double tr_E = U.trace() + r_seg / 6.0;
        const double psi_minus_U = psi_det(-U).second; // log det(I + U) - tr U
        w += tr_E + psi_minus_U;
    }
    return w;
}

} // namespace pathmc
