// Acceptance suite: one line per criterion, nonzero exit when any fail.
// Every tolerance is written out literally next to the check it guards.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "pathmc/heat.hpp"
#include "pathmc/ibp.hpp"
#include "pathmc/jacobi.hpp"
#include "pathmc/montecarlo.hpp"
#include "pathmc/stats.hpp"

using namespace pathmc;

namespace {

constexpr std::uint64_t kSeed = 7;
int g_failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int index, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    std::printf("[%s] C%-2d %-34s %s (%.1f s)\n", pass ? "PASS" : "FAIL", index, name.c_str(),
                detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

// C1: flat-space degeneracy in d = 1, 2, 3
void criterion_flat_degeneracy() {
    Timer timer;
    bool pass = true;
    std::string detail;
    for (int d = 1; d <= 3 && pass; ++d) {
        FlatSpace m(d);
        const Partition p = Partition::uniform(16);
        double max_rho_dev = 0.0, max_dev_cumsum = 0.0;
        for (std::uint64_t r = 0; r < 2000; ++r) {
            const DrivingPath b = sample_bp(p, d, RngStream(kSeed, r));
            const GeodesicPath sigma = develop(m, b);
            max_rho_dev = std::max(max_rho_dev, std::abs(rho_p(sigma).rho - 1.0));
            Vec cum = Vec::Zero(d);
            for (int i = 0; i < 16; ++i) {
                cum += b.increments.col(i);
                max_dev_cumsum =
                    std::max(max_dev_cumsum, (sigma.vertex(i + 1) - cum).cwiseAbs().maxCoeff());
            }
        }
        auto f = [](const GeodesicPath& s) { return std::sin(s.vertex(s.segments())[0]); };
        const McEstimate e0 = expectation_nu0(m, p, f, 4000, kSeed);
        const McEstimate e1 = expectation_nu1(m, p, f, 4000, kSeed);
        const bool bitwise = e0.mean == e1.mean && e0.std_error == e1.std_error;
        pass = max_rho_dev <= 1e-12 && max_dev_cumsum <= 1e-14 && bitwise;
        detail = fmt("d=%d |rho-1|<=%.1e devcum<=%.1e nu0==nu1:%s", d, max_rho_dev,
                     max_dev_cumsum, bitwise ? "yes" : "no");
    }
    report(1, "flat-space degeneracy", pass && timer.elapsed() < 1.0,
           detail + fmt(" budget<1s"), timer.elapsed());
}

// C2: mean rho_P -> exp(-1/3) on S^2 with decreasing bias
void criterion_density_limit() {
    Timer timer;
    Sphere sph(2);
    const double target = std::exp(-1.0 / 3.0);
    std::vector<double> bias;
    McEstimate last{};
    for (int n : {8, 16, 32, 64}) {
        last = expectation_nu0(sph, Partition::uniform(n),
                               [](const GeodesicPath&) { return 1.0; }, 200000, kSeed);
        bias.push_back(std::abs(last.mean - target));
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < bias.size(); ++i) decreasing = decreasing && bias[i] < bias[i - 1];
    const bool within = bias.back() <= 3.0 * last.std_error;
    report(2, "scalar-curvature correction",
           within && decreasing && timer.elapsed() < 120.0,
           fmt("mean=%.6f target=%.6f |bias|=%.1e 3se=%.1e decreasing:%s", last.mean, target,
               bias.back(), 3.0 * last.std_error, decreasing ? "yes" : "no"),
           timer.elapsed());
}

// C3: weighted endpoint observable under both measures
void criterion_weighted_observable() {
    Timer timer;
    Sphere sph(2);
    const Partition p = Partition::uniform(64);
    auto f = [](const GeodesicPath& s) { return s.vertex(s.segments())[2]; };
    const McEstimate e1 = expectation_nu1(sph, p, f, 200000, kSeed);
    const McEstimate e0 = expectation_nu0(sph, p, f, 200000, kSeed);
    const double t1 = std::exp(-1.0), t0 = std::exp(-4.0 / 3.0);
    const bool ok1 = std::abs(e1.mean - t1) <= 3.0 * e1.std_error;
    const bool ok0 = std::abs(e0.mean - t0) <= 3.0 * e0.std_error;
    report(3, "weighted endpoint observable", ok1 && ok0,
           fmt("nu1=%.6f (e^-1=%.6f, 3se=%.1e) nu0=%.6f (e^-4/3=%.6f, 3se=%.1e)", e1.mean, t1,
               3.0 * e1.std_error, e0.mean, t0, 3.0 * e0.std_error),
           timer.elapsed());
}

// C4: the alpha = 1/2 curvature weight restores the nu-expectation
void criterion_alpha_cancellation() {
    Timer timer;
    Sphere sph(2);
    const Partition p = Partition::uniform(64);
    auto f = [](const GeodesicPath& s) { return s.vertex(s.segments())[2]; };
    const McEstimate e = expectation_nu0(sph, p, f, 200000, kSeed, 0.5);
    const double target = std::exp(-1.0);
    const bool ok = std::abs(e.mean - target) <= 3.0 * e.std_error;
    report(4, "alpha-weighted cancellation", ok,
           fmt("estimate=%.6f target=%.6f 3se=%.1e", e.mean, target, 3.0 * e.std_error),
           timer.elapsed());
}

// C5: heat-kernel Euler scheme on the 64 x 128 grid
void criterion_heat_euler() {
    Timer timer;
    Sphere sph(2);
    const double s_total = 0.5;
    const std::vector<int> ns{4, 8, 16, 32, 64};
    Vec f_nodes, reference;
    double f_sup = 1.0;
    std::vector<double> log_n, log_err;
    double err64_corrected = 0.0, err64_raw = 0.0;
    for (double kappa : {1.0 / 12.0, 0.0}) {
        for (int n : ns) {
            if (kappa == 0.0 && n != 64) continue; // the plateau only needs the finest level
            HeatKernelGrid grid = build_grid(sph, 64, 128, s_total / double(n), kappa);
            if (f_nodes.size() == 0) {
                f_nodes.resize(grid.size());
                for (int i = 0; i < grid.size(); ++i) f_nodes[i] = grid.nodes(2, i);
                f_sup = f_nodes.cwiseAbs().maxCoeff();
                reference = std::exp(-s_total) * f_nodes; // degree-one eigenfunction
            }
            const Vec out = q_iterate(grid, f_nodes, n, s_total);
            const double err = (out - reference).cwiseAbs().maxCoeff() / f_sup;
            if (kappa == 0.0) {
                err64_raw = err;
            } else {
                log_n.push_back(std::log(double(n)));
                log_err.push_back(std::log(err));
                if (n == 64) err64_corrected = err;
            }
        }
    }
    const LineFit fit = fit_line(log_n, log_err);
    const bool ok = err64_corrected <= 0.01 && fit.slope >= -1.3 && fit.slope <= -0.7 &&
                    err64_raw >= 5.0 * err64_corrected && timer.elapsed() < 180.0;
    report(5, "heat-kernel Euler scheme", ok,
           fmt("sup_err(n=64)=%.2e (<=1%%) slope=%.2f (in [-1.3,-0.7]) kappa0/corr=%.0fx (>=5x)",
               err64_corrected, fit.slope, err64_raw / err64_corrected),
           timer.elapsed());
}

// C6: exact finite-dimensional integration by parts in quadrature mode
void criterion_finite_ibp() {
    Timer timer;
    bool pass = true;
    std::string detail;
    Sphere sph(2);
    FlatSpace flat(2);
    for (const Manifold* m : {static_cast<const Manifold*>(&sph), static_cast<const Manifold*>(&flat)}) {
        for (int n : {1, 2}) {
            const Partition p = Partition::uniform(n);
            Vec kp(2);
            kp << 1.0, 0.5;
            const EndpointLinear F(Vec::Unit(m->ambient_dim(), 0));
            IbpOptions opts; // quadrature, Gauss-Hermite order 20
            const IbpResult res = finite_ibp_check(*m, p, F, DirectionSpec::constant(p, kp), opts);
            const double tol = 1e-6 * std::max(1.0, std::abs(res.lhs));
            if (res.residual > tol) pass = false;
            detail = fmt("%s n=%d residual=%.1e tol=%.1e", m->name().c_str(), n, res.residual, tol);
            if (!pass) break;
        }
        if (!pass) break;
    }
    report(6, "exact finite-dimensional IBP", pass && timer.elapsed() < 30.0, detail,
           timer.elapsed());
}

// C7: limiting integration by parts at n = 100
void criterion_limit_ibp() {
    Timer timer;
    Sphere sph(2);
    const Partition p = Partition::uniform(100);
    const EndpointLinear F(Vec::Unit(3, 2));
    const DirectionSpec k = DirectionSpec::constant(p, Vec::Unit(2, 0));
    const IbpResult res = limit_ibp_check(sph, p, F, k, 100000, kSeed);
    const bool ok = res.residual <= 3.0 * res.se && timer.elapsed() < 120.0;
    report(7, "limiting IBP", ok,
           fmt("lhs=%.5f rhs=%.5f residual=%.1e 3se=%.1e", res.lhs, res.rhs, res.residual,
               3.0 * res.se),
           timer.elapsed());
}

// C8: k_P -> z convergence rate against the closed form on S^2
void criterion_kp_to_z() {
    Timer timer;
    Sphere sph(2);
    std::vector<double> log_mesh, log_err;
    for (int n : {8, 16, 32, 64, 128}) {
        const Partition p = Partition::uniform(n);
        const DirectionSpec k = DirectionSpec::constant(p, Vec::Unit(2, 0));
        const std::uint64_t N = 600;
        std::vector<double> sups(N);
        for (std::uint64_t r = 0; r < N; ++r) {
            const GeodesicPath sigma = develop(sph, sample_bp(p, 2, RngStream(kSeed, r)));
            const PathTangent h = kp_transport(sigma, k);
            double sup = 0.0;
            for (int i = 0; i <= n; ++i) {
                // closed form: Ric = I on S^2, so z(s) = 2 (1 - e^{-s/2}) e_1
                const double zi = 2.0 * (1.0 - std::exp(-0.5 * p.time(i)));
                sup = std::max(sup, (h.value(i) - zi * Vec::Unit(2, 0)).norm());
            }
            sups[r] = sup;
        }
        log_mesh.push_back(std::log(1.0 / double(n)));
        log_err.push_back(std::log(mean_se(sups).mean));
    }
    const LineFit fit = fit_line(log_mesh, log_err);
    report(8, "k_P to z convergence rate", fit.slope >= 0.4,
           fmt("fitted rate=%.3f (>=0.4)", fit.slope), timer.elapsed());
}

// C9: Wong-Zakai self-refinement rate of the endpoint
void criterion_wz_rate() {
    Timer timer;
    Sphere sph(2);
    const WzRateResult res =
        wz_rate(sph, [](const Vec& x) { return x; }, {8, 16, 32, 64, 128}, 3000, kSeed);
    report(9, "Wong-Zakai endpoint rate", res.slope >= 0.4,
           fmt("fitted rate=%.3f (>=0.4)", res.slope), timer.elapsed());
}

// C10: appendix identities
void criterion_appendix_identities() {
    Timer timer;
    // determinant identity and remainder bound
    std::mt19937_64 gen(kSeed);
    double max_identity_err = 0.0;
    bool bound_ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = 2 + trial % 3;
        Mat U = Mat::NullaryExpr(d, d, [&](Eigen::Index, Eigen::Index) {
            return std::uniform_real_distribution<double>(-1.0, 1.0)(gen);
        });
        U *= 0.5 / std::max(operator_norm(U), 1e-12) *
             std::uniform_real_distribution<double>(0.05, 1.0)(gen);
        const auto [det, psi] = psi_det(U);
        max_identity_err = std::max(max_identity_err, std::abs(det - std::exp(-U.trace() + psi)));
        const double nu = operator_norm(U);
        bound_ok = bound_ok && std::abs(psi) <= double(d) * nu * nu / (1.0 - nu) + 1e-14;
    }
    // Gaussian exponential moment vs the product closed form
    const GaussianIdentityResult gi =
        gaussian_identity_check(Partition::uniform(8), 2, 0.5, 1.0, 200000, kSeed);
    const bool gauss_ok = std::abs(gi.mc.mean - gi.exact) <= 3.0 * gi.mc.std_error;
    // segment expansion error within the stated remainder bound
    Sphere sph(2);
    bool expansion_ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
        Vec db(2);
        std::normal_distribution<double> g;
        db << g(gen), g(gen);
        db *= std::uniform_real_distribution<double>(0.01, 0.8)(gen) / db.norm();
        const double ds = std::uniform_real_distribution<double>(0.05, 0.5)(gen);
        const SegmentJacobi sj =
            segment_jacobi(sph, Frame{sph.base_point(), sph.base_frame()}, db, ds);
        const double r = db.norm();
        const Mat E = sj.Z / ds - Mat::Identity(2, 2) -
                      (1.0 / 6.0) * (db * db.transpose() - r * r * Mat::Identity(2, 2));
        const double bound = (1.0 / 6.0) * (2.0 * r * r * r + 0.5 * r * r * r * r) * std::cosh(r);
        expansion_ok = expansion_ok && operator_norm(E) <= bound + 1e-14;
    }
    const bool pass = max_identity_err <= 1e-12 && bound_ok && gauss_ok && expansion_ok;
    report(10, "appendix identities", pass,
           fmt("det_id_err=%.1e (<=1e-12) psi_bound:%s gauss_mc:|%.4f-%.4f|<=%.1e expansion:%s",
               max_identity_err, bound_ok ? "ok" : "violated", gi.mc.mean, gi.exact,
               3.0 * gi.mc.std_error, expansion_ok ? "ok" : "violated"),
           timer.elapsed());
}

// C11: tail fractions decay in the mesh
void criterion_tail_decay() {
    Timer timer;
    Sphere sph(2);
    const double eps = 0.5;
    std::vector<double> inv_mesh, log_frac, log_frac_w;
    for (int n : {16, 32, 64}) {
        const TailFractions tf = tail_fraction(sph, Partition::uniform(n), eps, 200000, kSeed);
        inv_mesh.push_back(double(n));
        log_frac.push_back(std::log(tf.nu1.mean));
        log_frac_w.push_back(std::log(std::max(tf.weighted.mean, 1e-300)));
    }
    const double slope = fit_line(inv_mesh, log_frac).slope;
    const double slope_w = fit_line(inv_mesh, log_frac_w).slope;
    const double threshold = -eps * eps / 8.0;
    const bool ok = slope <= threshold && slope_w <= threshold;
    report(11, "tail-bound decay", ok,
           fmt("slope_nu1=%.4f slope_weighted=%.4f (<=%.5f)", slope, slope_w, threshold),
           timer.elapsed());
}

} // namespace

int main() {
    std::printf("acceptance suite (seed %llu)\n", static_cast<unsigned long long>(kSeed));
    criterion_flat_degeneracy();
    criterion_density_limit();
    criterion_weighted_observable();
    criterion_alpha_cancellation();
    criterion_heat_euler();
    criterion_finite_ibp();
    criterion_limit_ibp();
    criterion_kp_to_z();
    criterion_wz_rate();
    criterion_appendix_identities();
    criterion_tail_decay();
    std::printf("%d of 11 criteria failed\n", g_failures);
    return g_failures;
}
