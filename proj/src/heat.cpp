#include "pathmc/heat.hpp"

#include <cmath>

#include "pathmc/quadrature.hpp"

namespace pathmc {

double q_kernel(const Manifold& m, const Vec& x, const Vec& y, double s, double kappa) {
    if (!(s > 0.0)) throw std::invalid_argument("q_kernel: s must be positive");
    const double dist = m.distance(x, y);
    const double pref = std::pow(2.0 * M_PI * s, -0.5 * double(m.dim()));
    return pref * std::exp(-dist * dist / (2.0 * s) + kappa * s * (m.scalar(x) + m.scalar(y)));
}

namespace {

void assemble_kernel(HeatKernelGrid& grid) {
    const int n = grid.size();
    const Manifold& m = *grid.manifold;
    grid.kernel.resize(n, n);
    // symmetric before the weight scaling; fill both triangles from one eval
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double q = q_kernel(m, grid.nodes.col(i), grid.nodes.col(j), grid.s, grid.kappa);
            grid.kernel(i, j) = q;
            grid.kernel(j, i) = q;
        }
    }
    grid.kernel = grid.kernel * grid.weights.asDiagonal();
}

} // namespace

HeatKernelGrid build_grid(const Manifold& m, int res_theta, int res_phi, double s, double kappa) {
    if (res_theta < 8 || res_phi < 8) throw ConfigError("build_grid: resolution must be >= 8");
    if (!(s > 0.0)) throw ConfigError("build_grid: step s must be positive");
    if (m.name().rfind("flat", 0) == 0)
        throw ConfigError("build_grid: flat space needs the truncation-box builder");
    if (m.dim() != 2 || m.ambient_dim() != 3)
        throw CapabilityError("build_grid: only S^2 grids are supported");

    HeatKernelGrid grid;
    grid.manifold = &m;
    grid.s = s;
    grid.kappa = kappa;
    grid.nodes.resize(3, res_theta * res_phi);
    grid.weights.resize(res_theta * res_phi);

    const QuadratureRule gl = gauss_legendre(res_theta); // nodes are cos(theta)
    const double dphi = 2.0 * M_PI / double(res_phi);
    int idx = 0;
    for (int k = 0; k < res_theta; ++k) {
        const double ct = gl.nodes[static_cast<std::size_t>(k)];
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        const double wt = gl.weights[static_cast<std::size_t>(k)] * dphi;
        for (int j = 0; j < res_phi; ++j) {
            const double phi = dphi * (double(j) + 0.5);
            grid.nodes(0, idx) = st * std::cos(phi);
            grid.nodes(1, idx) = st * std::sin(phi);
            grid.nodes(2, idx) = ct;
            grid.weights[idx] = wt;
            ++idx;
        }
    }
    assemble_kernel(grid);
    return grid;
}

double flat_box_half_width(double s_total) { return 6.0 * std::sqrt(s_total); }

HeatKernelGrid build_flat_grid(const Manifold& m, int res_per_axis, double s, double half_width,
                               double kappa) {
    if (res_per_axis < 8) throw ConfigError("build_flat_grid: resolution must be >= 8");
    if (!(s > 0.0)) throw ConfigError("build_flat_grid: step s must be positive");
    if (!(half_width > 0.0))
        throw ConfigError("build_flat_grid: flat space is unbounded, a truncation box is required");
    const int d = m.dim();
    if (m.name().rfind("flat", 0) != 0 || d > 2)
        throw CapabilityError("build_flat_grid: only flat-1 and flat-2 grids are supported");

    HeatKernelGrid grid;
    grid.manifold = &m;
    grid.s = s;
    grid.kappa = kappa;
    const QuadratureRule gl = gauss_legendre(res_per_axis, -half_width, half_width);
    if (d == 1) {
        grid.nodes.resize(1, res_per_axis);
        grid.weights.resize(res_per_axis);
        for (int i = 0; i < res_per_axis; ++i) {
            grid.nodes(0, i) = gl.nodes[static_cast<std::size_t>(i)];
            grid.weights[i] = gl.weights[static_cast<std::size_t>(i)];
        }
    } else {
        const int n = res_per_axis * res_per_axis;
        grid.nodes.resize(2, n);
        grid.weights.resize(n);
        int idx = 0;
        for (int i = 0; i < res_per_axis; ++i)
            for (int j = 0; j < res_per_axis; ++j) {
                grid.nodes(0, idx) = gl.nodes[static_cast<std::size_t>(i)];
                grid.nodes(1, idx) = gl.nodes[static_cast<std::size_t>(j)];
                grid.weights[idx] = gl.weights[static_cast<std::size_t>(i)] *
                                    gl.weights[static_cast<std::size_t>(j)];
                ++idx;
            }
    }
    assemble_kernel(grid);
    return grid;
}

Vec q_iterate(const HeatKernelGrid& grid, const Vec& f_nodes, int n, double s_total) {
    if (f_nodes.size() != grid.weights.size())
        throw std::invalid_argument("q_iterate: node-value vector does not match the grid");
    if (n < 0) throw std::invalid_argument("q_iterate: n must be nonnegative");
    if (n > 0 && std::abs(grid.s * double(n) - s_total) > 1e-9 * std::max(1.0, s_total))
        throw ConfigError("q_iterate: grid step does not equal s_total / n");
    Vec f = f_nodes;
    Vec tmp(f.size());
    for (int k = 0; k < n; ++k) {
        tmp.noalias() = grid.kernel * f;
        f.swap(tmp);
    }
    return f;
}

Vec reference_heat(const HeatKernelGrid& grid, const Vec& f_nodes, double s) {
    const Manifold& m = *grid.manifold;
    if (!(s > 0.0)) throw std::invalid_argument("reference_heat: s must be positive");
    const int n = grid.size();
    Vec out(n);

    if (m.name().rfind("flat", 0) == 0) {
        const double pref = std::pow(2.0 * M_PI * s, -0.5 * double(m.dim()));
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) {
                const double d2 = (grid.nodes.col(i) - grid.nodes.col(j)).squaredNorm();
                acc += pref * std::exp(-d2 / (2.0 * s)) * grid.weights[j] * f_nodes[j];
            }
            out[i] = acc;
        }
        return out;
    }
    if (m.dim() != 2)
        throw CapabilityError("reference_heat: spectral reference only available on S^2");

    // p_s(x,y) = sum_l (2l+1)/(4 pi) e^{-l(l+1)s/2} P_l(cos theta)
    int l_max = 0;
    while (l_max < 4000 &&
           (2.0 * l_max + 1.0) / (4.0 * M_PI) * std::exp(-0.5 * l_max * (l_max + 1.0) * s) > 1e-14)
        ++l_max;
    if (l_max >= 4000)
        throw CapabilityError("reference_heat: s too small for the truncated expansion");
    std::vector<double> coeff(static_cast<std::size_t>(l_max) + 1);
    for (int l = 0; l <= l_max; ++l)
        coeff[static_cast<std::size_t>(l)] =
            (2.0 * l + 1.0) / (4.0 * M_PI) * std::exp(-0.5 * l * (l + 1.0) * s);

    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const double c = std::clamp(grid.nodes.col(i).dot(grid.nodes.col(j)), -1.0, 1.0);
            double p0 = 1.0, p1 = c, ker = coeff[0];
            if (l_max >= 1) ker += coeff[1] * p1;
            for (int l = 2; l <= l_max; ++l) {
                const double p2 = ((2.0 * l - 1.0) * c * p1 - (l - 1.0) * p0) / double(l);
                ker += coeff[static_cast<std::size_t>(l)] * p2;
                p0 = p1;
                p1 = p2;
            }
            acc += ker * grid.weights[j] * f_nodes[j];
        }
        out[i] = acc;
    }
    return out;
}

} // namespace pathmc
