#include "pathmc/ibp.hpp"

#include <cmath>

#include "pathmc/errors.hpp"
#include "pathmc/jacobi.hpp"
#include "pathmc/montecarlo.hpp"
#include "pathmc/quadrature.hpp"
#include "pathmc/rng.hpp"
#include "pathmc/stats.hpp"

namespace pathmc {

Vec CylinderFunction::gradient(const Manifold& m, const std::vector<Vec>& vertices,
                               const std::vector<Mat>& frames, int i) const {
    const double t = 1e-6;
    const Mat& u = frames[static_cast<std::size_t>(i)];
    Vec grad = Vec::Zero(m.ambient_dim());
    std::vector<Vec> moved = vertices;
    for (int a = 0; a < m.dim(); ++a) {
        moved[static_cast<std::size_t>(i)] = m.exp_map(vertices[static_cast<std::size_t>(i)], t * u.col(a));
        const double fp = value(moved);
        moved[static_cast<std::size_t>(i)] = m.exp_map(vertices[static_cast<std::size_t>(i)], -t * u.col(a));
        const double fm = value(moved);
        moved[static_cast<std::size_t>(i)] = vertices[static_cast<std::size_t>(i)];
        grad += ((fp - fm) / (2.0 * t)) * u.col(a);
    }
    return grad;
}

std::pair<double, double> g_metrics(const GeodesicPath& sigma, const PathTangent& X,
                                    const PathTangent& Y) {
    if (X.base() != &sigma || Y.base() != &sigma)
        throw std::domain_error("g_metrics: tangents must live over the given path");
    double g1 = 0.0, g0 = 0.0;
    for (int i = 0; i < sigma.segments(); ++i) {
        const double ds = sigma.partition.dt(i);
        g1 += X.kick(i).dot(Y.kick(i)) * ds;
        g0 += X.value(i + 1).dot(Y.value(i + 1)) * ds;
    }
    return {g1, g0};
}

PathTangent onb_frame(const GeodesicPath& sigma, int segment, int axis) {
    const int d = sigma.manifold->dim();
    const int n = sigma.segments();
    if (segment < 0 || segment >= n || axis < 0 || axis >= d)
        throw std::invalid_argument("onb_frame: segment/axis out of range");
    Mat kicks = Mat::Zero(d, n);
    kicks(axis, segment) = 1.0 / std::sqrt(sigma.partition.dt(segment));
    return PathTangent::from_kicks(sigma, kicks);
}

double dE(const GeodesicPath& sigma, const PathTangent& X) {
    if (X.base() != &sigma) throw std::domain_error("dE: tangent does not live over this path");
    double acc = 0.0;
    for (int i = 0; i < sigma.segments(); ++i)
        acc += sigma.driving.increments.col(i).dot(X.kick(i));
    return 2.0 * acc;
}

PathTangent kp_transport(const GeodesicPath& sigma, const DirectionSpec& k) {
    if (!(k.partition == sigma.partition))
        throw std::invalid_argument("kp_transport: direction and path partitions differ");
    if (k.dim() != sigma.manifold->dim())
        throw std::invalid_argument("kp_transport: dimension mismatch");
    return PathTangent::from_kicks(sigma, k.derivs);
}

double divergence_nu1(const GeodesicPath& sigma, const DirectionSpec& k) {
    if (!(k.partition == sigma.partition))
        throw std::invalid_argument("divergence_nu1: direction and path partitions differ");
    double acc = 0.0;
    for (int i = 0; i < sigma.segments(); ++i)
        acc += k.derivs.col(i).dot(sigma.driving.increments.col(i));
    return -acc;
}

namespace {

std::vector<Vec> path_vertices(const GeodesicPath& sigma) {
    std::vector<Vec> v;
    v.reserve(static_cast<std::size_t>(sigma.segments()));
    for (int i = 1; i <= sigma.segments(); ++i) v.push_back(sigma.vertex(i));
    return v;
}

// (X^{k_P} f)(sigma) by central differences along the vertex flow
// x_i -> exp(x_i, t u_i h(s_i)).
double directional_derivative(const Manifold& m, const GeodesicPath& sigma,
                              const CylinderFunction& F, const PathTangent& h, double t) {
    const int n = sigma.segments();
    std::vector<Vec> plus(static_cast<std::size_t>(n)), minus(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        const Vec dir = sigma.frames[static_cast<std::size_t>(i)] * h.value(i);
        plus[static_cast<std::size_t>(i - 1)] = m.exp_map(sigma.vertex(i), t * dir);
        minus[static_cast<std::size_t>(i - 1)] = m.exp_map(sigma.vertex(i), -t * dir);
    }
    return (F.value(plus) - F.value(minus)) / (2.0 * t);
}

struct IbpSample {
    double lhs;
    double rhs;
};

IbpSample ibp_terms(const Manifold& m, const Partition& p, const CylinderFunction& F,
                    const DirectionSpec& k, const Mat& increments, double fd_step) {
    // quadrature nodes legitimately reach past the injectivity radius; the
    // identity integrates over all of H_P and the increments stay the true
    // anti-development
    const GeodesicPath sigma = develop(m, DrivingPath(p, increments), true);
    const PathTangent h = kp_transport(sigma, k);
    IbpSample out;
    out.lhs = directional_derivative(m, sigma, F, h, fd_step);
    out.rhs = F.value(path_vertices(sigma)) * (-divergence_nu1(sigma, k));
    return out;
}

} // namespace

IbpResult finite_ibp_check(const Manifold& m, const Partition& p, const CylinderFunction& F,
                           const DirectionSpec& k, const IbpOptions& opts) {
    const int d = m.dim();
    const int n = p.segments();
    IbpResult res;

    if (opts.mode == IbpMode::Quadrature) {
        const int dims = d * n;
        if (dims > 6)
            throw ConfigError("finite_ibp_check: quadrature mode requires d*n <= 6");
        const QuadratureRule gh = gauss_hermite_prob(opts.gauss_hermite_order);
        const int q = int(gh.nodes.size());
        std::vector<int> idx(static_cast<std::size_t>(dims), 0);
        Mat incs(d, n);
        double lhs = 0.0, rhs = 0.0;
        while (true) {
            double w = 1.0;
            for (int t = 0; t < dims; ++t) {
                const int seg = t / d, comp = t % d;
                incs(comp, seg) = std::sqrt(p.dt(seg)) * gh.nodes[static_cast<std::size_t>(idx[static_cast<std::size_t>(t)])];
                w *= gh.weights[static_cast<std::size_t>(idx[static_cast<std::size_t>(t)])];
            }
            const IbpSample s = ibp_terms(m, p, F, k, incs, opts.fd_step);
            lhs += w * s.lhs;
            rhs += w * s.rhs;
            // odometer over the tensor index
            int t = 0;
            while (t < dims && ++idx[static_cast<std::size_t>(t)] == q) idx[static_cast<std::size_t>(t++)] = 0;
            if (t == dims) break;
        }
        res.lhs = lhs;
        res.rhs = rhs;
        res.residual = std::abs(lhs - rhs);
        return res;
    }

    std::vector<double> lhs_vals(opts.n_samples), diff_vals(opts.n_samples);
    std::vector<double> rhs_vals(opts.n_samples);
    parallel_for_replicas(opts.n_samples, opts.threads, [&](std::uint64_t r) {
        const DrivingPath b = sample_bp(p, d, RngStream(opts.seed, r));
        const IbpSample s = ibp_terms(m, p, F, k, b.increments, opts.fd_step);
        lhs_vals[r] = s.lhs;
        rhs_vals[r] = s.rhs;
        diff_vals[r] = s.lhs - s.rhs;
    });
    const MeanSe l = mean_se(lhs_vals), rr = mean_se(rhs_vals), dd = mean_se(diff_vals);
    res.lhs = l.mean;
    res.rhs = rr.mean;
    res.residual = std::abs(dd.mean);
    res.se = dd.se;
    return res;
}

ZField z_field(const GeodesicPath& sigma, const DirectionSpec& k) {
    if (!(k.partition == sigma.partition))
        throw std::invalid_argument("z_field: direction and path partitions differ");
    const Manifold& m = *sigma.manifold;
    const int d = m.dim();
    const int n = sigma.segments();
    ZField z{sigma.partition, Mat::Zero(d, n + 1)};
    for (int i = 0; i < n; ++i) {
        const double ds = sigma.partition.dt(i);
        const Mat ric = m.ricci_frame(sigma.frame_at(i));
        const Vec kp = k.derivs.col(i);
        const Vec zi = z.values.col(i);
        // midpoint rule for z' = k' - (1/2) Ric z with Ric frozen on the segment
        const Vec zmid = zi + 0.5 * ds * (kp - 0.5 * ric * zi);
        z.values.col(i + 1) = zi + ds * (kp - 0.5 * ric * zmid);
    }
    return z;
}

IbpResult limit_ibp_check(const Manifold& m, const Partition& p, const CylinderFunction& F,
                          const DirectionSpec& k, std::uint64_t n_samples, std::uint64_t seed,
                          int threads) {
    const int d = m.dim();
    std::vector<double> lhs_vals(n_samples), rhs_vals(n_samples), diff_vals(n_samples);
    parallel_for_replicas(n_samples, threads, [&](std::uint64_t r) {
        const GeodesicPath sigma = develop(m, sample_bp(p, d, RngStream(seed, r)));
        const ZField z = z_field(sigma, k);
        const std::vector<Vec> verts = path_vertices(sigma);
        const std::vector<Mat> vert_frames(sigma.frames.begin() + 1, sigma.frames.end());
        double lhs = 0.0;
        for (int i = 1; i <= sigma.segments(); ++i) {
            const Vec grad = F.gradient(m, verts, vert_frames, i - 1);
            if (grad.squaredNorm() == 0.0) continue;
            lhs += grad.dot(sigma.frames[static_cast<std::size_t>(i)] * z.value(i));
        }
        const double rhs = F.value(verts) * (-divergence_nu1(sigma, k));
        lhs_vals[r] = lhs;
        rhs_vals[r] = rhs;
        diff_vals[r] = lhs - rhs;
    });
    const MeanSe l = mean_se(lhs_vals), rr = mean_se(rhs_vals), dd = mean_se(diff_vals);
    IbpResult res;
    res.lhs = l.mean;
    res.rhs = rr.mean;
    res.residual = std::abs(dd.mean);
    res.se = dd.se;
    return res;
}

} // namespace pathmc
