#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "pathmc/manifold.hpp"
#include "pathmc/partition.hpp"
#include "pathmc/paths.hpp"
#include "pathmc/types.hpp"

namespace pathmc {

// Piecewise-C^1 direction k with k(0) = 0, stored by its right derivatives
// k'(s_{i-1}+) on a reference partition (piecewise-constant derivative).
struct DirectionSpec {
    Partition partition;
    Mat derivs; // d x n, column i = k'(s_{i-1}+)

    DirectionSpec(Partition p, Mat d_)
        : partition(std::move(p)), derivs(std::move(d_)) {
        if (derivs.cols() != partition.segments())
            throw std::invalid_argument("DirectionSpec: one derivative column per segment");
    }

    static DirectionSpec constant(const Partition& p, const Vec& kprime) {
        Mat d(kprime.size(), p.segments());
        for (int i = 0; i < p.segments(); ++i) d.col(i) = kprime;
        return DirectionSpec(p, std::move(d));
    }

    int dim() const { return int(derivs.rows()); }

    Vec value(int i) const { // k(s_i)
        Vec v = Vec::Zero(dim());
        for (int j = 0; j < i; ++j) v += derivs.col(j) * partition.dt(j);
        return v;
    }

    double norm_1p() const { // ||k'||_{1,P}
        double s = 0.0;
        for (int i = 0; i < partition.segments(); ++i) s += derivs.col(i).norm() * partition.dt(i);
        return s;
    }
};

// Solution values of z' + (1/2) Ric_{u(s)} z = k'(s), z(0) = 0 at the
// partition points of the underlying path.
struct ZField {
    Partition partition;
    Mat values; // d x (n+1)
    Vec value(int i) const { return values.col(i); }
};

// Path-space metrics: G^1 from right-derivatives, G^0 from values.
std::pair<double, double> g_metrics(const GeodesicPath& sigma, const PathTangent& X,
                                    const PathTangent& Y);

// Element (i, a) of the G^1-orthonormal tangent frame: the Jacobi tangent
// with the single normalized kick e_a / sqrt(Delta_i s) on segment i
// (0-based) and zero kicks elsewhere.
PathTangent onb_frame(const GeodesicPath& sigma, int segment, int axis);

// Energy differential dE(X) = 2 sum <Delta_i b, h'(s_{i-1}+)>; exact for
// Jacobi tangents because <b', h'> is constant along each segment.
double dE(const GeodesicPath& sigma, const PathTangent& X);

// Tangent field X^{k_P}: kicks prescribed by k's right derivatives.
PathTangent kp_transport(const GeodesicPath& sigma, const DirectionSpec& k);

// div_{nu_P^1} X^{k_P}(sigma) = -sum <k'(s_{i-1}+), Delta_i b>.
double divergence_nu1(const GeodesicPath& sigma, const DirectionSpec& k);

// Smooth cylinder function of the vertex tuple (x_1, ..., x_n). gradient()
// must return the intrinsic gradient in vertex i as an ambient tangent
// vector; the default evaluates central differences along geodesic flows in
// the frame directions, which is exact in the limit for any smooth F.
class CylinderFunction {
public:
    virtual ~CylinderFunction() = default;
    virtual double value(const std::vector<Vec>& vertices) const = 0;
    virtual Vec gradient(const Manifold& m, const std::vector<Vec>& vertices,
                         const std::vector<Mat>& frames, int i) const;
};

// F(x_1, ..., x_n) = <x_n, a> for a fixed ambient vector a; the intrinsic
// gradient is the tangent projection of a at the endpoint.
class EndpointLinear final : public CylinderFunction {
public:
    explicit EndpointLinear(Vec a) : a_(std::move(a)) {}
    double value(const std::vector<Vec>& vertices) const override {
        return vertices.back().dot(a_);
    }
    Vec gradient(const Manifold& m, const std::vector<Vec>& vertices, const std::vector<Mat>&,
                 int i) const override {
        if (i != int(vertices.size()) - 1) return Vec::Zero(m.ambient_dim());
        return m.project_tangent(vertices.back(), a_);
    }

private:
    Vec a_;
};

enum class IbpMode { Quadrature, Mc };

struct IbpOptions {
    IbpMode mode = IbpMode::Quadrature;
    int gauss_hermite_order = 20;
    std::uint64_t n_samples = 100000;
    std::uint64_t seed = 0;
    double fd_step = 1e-5; // vertex-flow finite-difference step
    int threads = 1;
};

struct IbpResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    double se = 0.0; // Monte Carlo mode only
};

// Exact finite-dimensional integration by parts:
//   int (X^{k_P} f) dnu_P^1 = int f (sum <k'(s_{i-1}+), Delta_i b>) dnu_P^1
// with f = F(vertices). The left side differentiates F by central finite
// differences along the vertex flow x_i -> exp(x_i, t u_i h(s_i)); the
// integral over the Gaussian increments runs on a tensor Gauss-Hermite rule
// (d*n <= 6) or by shared-stream Monte Carlo.
IbpResult finite_ibp_check(const Manifold& m, const Partition& p, const CylinderFunction& F,
                           const DirectionSpec& k, const IbpOptions& opts);

// Integrates z' + (1/2) Ric z = k' with Ric frozen per segment at the left
// frame (midpoint rule). On S^d Ric = (d-1) I, so the closed-form solution
// is available as a test oracle.
ZField z_field(const GeodesicPath& sigma, const DirectionSpec& k);

// Monte Carlo check of the limiting formula: the X^z derivative of a
// cylinder function against the Ito pairing sum <k'(s_{i-1}+), Delta_i b>,
// with common random numbers.
IbpResult limit_ibp_check(const Manifold& m, const Partition& p, const CylinderFunction& F,
                          const DirectionSpec& k, std::uint64_t n_samples, std::uint64_t seed,
                          int threads = 1);

} // namespace pathmc
