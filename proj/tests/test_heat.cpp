#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pathmc/heat.hpp"
#include "pathmc/quadrature.hpp"
#include "pathmc/stats.hpp"
#include "test_util.hpp"

using namespace pathmc;
using namespace pathmc::testing;

namespace {

Vec height_function(const HeatKernelGrid& grid) {
    Vec f(grid.size());
    for (int i = 0; i < grid.size(); ++i) f[i] = grid.nodes(2, i);
    return f;
}

// quadrature of the kernel from a fixed source point, no matrix needed
double kernel_mass_from(const Manifold& m, const Vec& x, int res_theta, int res_phi, double s,
                        double kappa) {
    const QuadratureRule gl = gauss_legendre(res_theta);
    const double dphi = 2.0 * M_PI / double(res_phi);
    double acc = 0.0;
    for (int k = 0; k < res_theta; ++k) {
        const double ct = gl.nodes[static_cast<std::size_t>(k)];
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int j = 0; j < res_phi; ++j) {
            const double phi = dphi * (double(j) + 0.5);
            Vec y(3);
            y << st * std::cos(phi), st * std::sin(phi), ct;
            acc += q_kernel(m, x, y, s, kappa) * gl.weights[static_cast<std::size_t>(k)] * dphi;
        }
    }
    return acc;
}

} // namespace

TEST_CASE("kernel point values") {
    SUBCASE("flat at coincident points") {
        FlatSpace m(2);
        CHECK(q_kernel(m, Vec::Zero(2), Vec::Zero(2), 1.0) ==
              doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-14));
    }
    SUBCASE("sphere at coincident points includes the curvature factor") {
        Sphere sph(2);
        const Vec x = sph.base_point();
        CHECK(q_kernel(sph, x, x, 0.1) ==
              doctest::Approx(std::exp(1.0 / 30.0) / (0.2 * M_PI)).epsilon(1e-13));
    }
    SUBCASE("symmetry in the arguments") {
        Sphere sph(2);
        auto gen = test_rng(301);
        for (int trial = 0; trial < 20; ++trial) {
            const Vec x = random_unit(gen, 3), y = random_unit(gen, 3);
            CHECK(q_kernel(sph, x, y, 0.3) == q_kernel(sph, y, x, 0.3));
        }
    }
}

TEST_CASE("sphere grid construction") {
    Sphere sph(2);
    SUBCASE("weights sum to the sphere area") {
        HeatKernelGrid grid = build_grid(sph, 32, 64, 0.1);
        CHECK(std::abs(grid.weights.sum() - 4.0 * M_PI) < 1e-12);
        CHECK(grid.weights.minCoeff() > 0.0);
        CHECK(grid.kernel.minCoeff() > 0.0);
    }
    SUBCASE("kernel symmetric before weight scaling") {
        HeatKernelGrid grid = build_grid(sph, 8, 8, 0.2);
        for (int i = 0; i < grid.size(); ++i)
            for (int j = 0; j < grid.size(); ++j)
                CHECK(grid.kernel(i, j) / grid.weights[j] ==
                      doctest::Approx(grid.kernel(j, i) / grid.weights[i]).epsilon(1e-12));
    }
    SUBCASE("resolution too small is rejected") {
        CHECK_THROWS_AS(build_grid(sph, 4, 64, 0.1), ConfigError);
    }
    SUBCASE("flat manifold needs the box builder") {
        FlatSpace m(2);
        CHECK_THROWS_AS(build_grid(m, 16, 16, 0.1), ConfigError);
        CHECK_THROWS_AS(build_flat_grid(m, 16, 0.1, 0.0), ConfigError);
    }
    SUBCASE("kernel mass converges as the grid doubles") {
        // row quadrature at the finest acceptance setting, s = 0.5 / 64
        const double s = 0.5 / 64.0;
        Vec equator(3), near_pole(3);
        equator << 1.0, 0.0, 0.0;
        near_pole << std::sin(0.02), 0.0, std::cos(0.02);
        for (const Vec& x : {equator, near_pole}) {
            const double fine = kernel_mass_from(sph, x, 64, 128, s, 1.0 / 12.0);
            const double finer = kernel_mass_from(sph, x, 128, 256, s, 1.0 / 12.0);
            CHECK(std::abs(finer - fine) / std::abs(finer) < 1e-6);
            CHECK(fine > 0.0);
            // one application of Q_s to F == 1: e^{s Scal / 6} times the
            // Gaussian mass on M, finite and grid-converged
            CHECK(fine == doctest::Approx(std::exp(s / 3.0) * (1.0 - s / 3.0)).epsilon(5e-3));
        }
    }
}

TEST_CASE("Euler iteration of the kernel") {
    SUBCASE("flat Chapman-Kolmogorov is exact to quadrature accuracy") {
        FlatSpace m(1);
        const double s_total = 0.25;
        const double half = flat_box_half_width(s_total);
        HeatKernelGrid fine = build_flat_grid(m, 96, s_total / 4.0, half, 0.0);
        HeatKernelGrid once = build_flat_grid(m, 96, s_total, half, 0.0);
        // a bump decaying inside the box keeps truncation out of the picture
        Vec f(fine.size());
        for (int i = 0; i < fine.size(); ++i)
            f[i] = std::exp(-fine.nodes(0, i) * fine.nodes(0, i));
        const Vec iterated = q_iterate(fine, f, 4, s_total);
        const Vec direct = q_iterate(once, f, 1, s_total);
        for (int i = 0; i < fine.size(); ++i)
            if (std::abs(fine.nodes(0, i)) < 0.5 * half)
                CHECK(iterated[i] == doctest::Approx(direct[i]).epsilon(1e-7));
    }
    SUBCASE("step mismatch is a configuration error") {
        Sphere sph(2);
        HeatKernelGrid grid = build_grid(sph, 8, 8, 0.1);
        Vec f = Vec::Ones(grid.size());
        CHECK_THROWS_AS(q_iterate(grid, f, 4, 1.0), ConfigError);
    }
    SUBCASE("zero applications leave the values unchanged") {
        Sphere sph(2);
        HeatKernelGrid grid = build_grid(sph, 8, 8, 0.1);
        Vec f = height_function(grid);
        CHECK((q_iterate(grid, f, 0, 0.0) - f).norm() == 0.0);
    }
    SUBCASE("eigenfunction decay on the sphere") {
        // Y_1^0 and Y_2^0 with eigenvalues l(l+1) = 2 and 6; the iteration
        // error decreases in n with a first-order slope
        Sphere sph(2);
        const double s = 0.5;
        for (int l : {1, 2}) {
            std::vector<double> log_n, log_err;
            double prev = 1e300;
            for (int n : {4, 8, 16, 32}) {
                HeatKernelGrid grid = build_grid(sph, 24, 48, s / double(n));
                Vec f(grid.size());
                for (int i = 0; i < grid.size(); ++i) {
                    const double z = grid.nodes(2, i);
                    f[i] = l == 1 ? z : 0.5 * (3.0 * z * z - 1.0);
                }
                const Vec out = q_iterate(grid, f, n, s);
                const double decay = std::exp(-0.5 * double(l) * double(l + 1) * s);
                const double err =
                    (out - decay * f).cwiseAbs().maxCoeff() / f.cwiseAbs().maxCoeff();
                CHECK(err < prev);
                prev = err;
                log_n.push_back(std::log(double(n)));
                log_err.push_back(std::log(err));
            }
            CHECK(std::exp(log_err.back()) < 0.05);
            const LineFit fit = fit_line(log_n, log_err);
            CHECK(fit.slope > -1.35);
            CHECK(fit.slope < -0.65);
        }
    }
    SUBCASE("positivity is preserved") {
        Sphere sph(2);
        HeatKernelGrid grid = build_grid(sph, 12, 24, 0.05);
        auto gen = test_rng(303);
        Vec f(grid.size());
        for (int i = 0; i < grid.size(); ++i)
            f[i] = std::abs(std::uniform_real_distribution<double>(0.0, 2.0)(gen));
        Vec out = q_iterate(grid, f, 4, 0.2);
        CHECK(out.minCoeff() >= 0.0);
    }
}

TEST_CASE("reference semigroup") {
    Sphere sph(2);
    SUBCASE("stochastic completeness: constants stay constant") {
        HeatKernelGrid grid = build_grid(sph, 24, 48, 0.1);
        const Vec out = reference_heat(grid, Vec::Ones(grid.size()), 0.7);
        for (int i = 0; i < grid.size(); ++i) CHECK(out[i] == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("degree-one eigenfunction decays at rate one") {
        HeatKernelGrid grid = build_grid(sph, 24, 48, 0.1);
        const Vec f = height_function(grid);
        const double s = 0.6;
        const Vec out = reference_heat(grid, f, s);
        CHECK((out - std::exp(-s) * f).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("short times approach the identity") {
        HeatKernelGrid grid = build_grid(sph, 32, 64, 0.1);
        const Vec f = height_function(grid);
        const Vec out = reference_heat(grid, f, 0.02);
        CHECK((out - f).cwiseAbs().maxCoeff() < 0.05);
    }
    SUBCASE("flat reference is the exact Gaussian convolution") {
        FlatSpace m(1);
        const double s = 0.2;
        HeatKernelGrid grid = build_flat_grid(m, 80, s, flat_box_half_width(s), 0.0);
        // e^{(s/2)Delta} applied to a Gaussian bump has a closed form
        const double a = 0.5; // bump variance
        Vec f(grid.size());
        for (int i = 0; i < grid.size(); ++i)
            f[i] = std::exp(-grid.nodes(0, i) * grid.nodes(0, i) / (2.0 * a));
        const Vec out = reference_heat(grid, f, s);
        for (int i = 0; i < grid.size(); ++i) {
            if (std::abs(grid.nodes(0, i)) > 1.5) continue;
            const double x = grid.nodes(0, i);
            const double expect = std::sqrt(a / (a + s)) * std::exp(-x * x / (2.0 * (a + s)));
            CHECK(out[i] == doctest::Approx(expect).epsilon(1e-6));
        }
    }
}

TEST_CASE("curvature correction constant matters") {
    // without the Scal term the iteration converges to the wrong limit
    Sphere sph(2);
    const double s = 0.5;
    const int n = 32;
    HeatKernelGrid corrected = build_grid(sph, 24, 48, s / n, 1.0 / 12.0);
    HeatKernelGrid uncorrected = build_grid(sph, 24, 48, s / n, 0.0);
    const Vec f = height_function(corrected);
    const double err_corr =
        (q_iterate(corrected, f, n, s) - std::exp(-s) * f).cwiseAbs().maxCoeff();
    const double err_raw =
        (q_iterate(uncorrected, f, n, s) - std::exp(-s) * f).cwiseAbs().maxCoeff();
    CHECK(err_raw > 5.0 * err_corr);
    // the kappa = 0 limit misses by about the factor exp(-s Scal / 6)
    const Vec raw = q_iterate(uncorrected, f, n, s);
    const double expected_factor = std::exp(-s / 3.0);
    const double observed =
        raw.cwiseAbs().maxCoeff() / (std::exp(-s) * f.cwiseAbs().maxCoeff());
    CHECK(observed == doctest::Approx(expected_factor).epsilon(0.05));
}
