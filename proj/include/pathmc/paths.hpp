#pragma once

#include <vector>

#include "pathmc/manifold.hpp"
#include "pathmc/partition.hpp"
#include "pathmc/types.hpp"

namespace pathmc {

// Piecewise-linear path in R^d stored by its per-segment increments; the
// increments are the sufficient statistic for everything downstream.
struct DrivingPath {
    Partition partition;
    int d = 0;
    Mat increments; // d x n, column i = Delta_i b

    DrivingPath(Partition p, int dim)
        : partition(std::move(p)), d(dim), increments(Mat::Zero(dim, partition.segments())) {}
    DrivingPath(Partition p, Mat incs)
        : partition(std::move(p)), d(int(incs.rows())), increments(std::move(incs)) {
        if (increments.cols() != partition.segments())
            throw std::invalid_argument("DrivingPath: one increment column per segment required");
    }

    int segments() const { return partition.segments(); }

    // b(s_i) by cumulative summation
    Vec vertex(int i) const {
        Vec v = Vec::Zero(d);
        for (int j = 0; j < i; ++j) v += increments.col(j);
        return v;
    }

    // E(b) = sum |Delta_i b|^2 / Delta_i s
    double energy() const {
        double e = 0.0;
        for (int i = 0; i < segments(); ++i)
            e += increments.col(i).squaredNorm() / partition.dt(i);
        return e;
    }
};

// Piecewise-geodesic path on M: vertices, parallel frames at the partition
// points, and the driving path it develops from.
struct GeodesicPath {
    Partition partition;
    const Manifold* manifold = nullptr;
    Mat vertices;             // ambient_dim x (n+1)
    std::vector<Mat> frames;  // (n+1) frames, ambient_dim x d each
    DrivingPath driving;

    int segments() const { return partition.segments(); }
    Vec vertex(int i) const { return vertices.col(i); }
    Frame frame_at(int i) const { return Frame{vertices.col(i), frames[static_cast<std::size_t>(i)]}; }
    double energy() const { return driving.energy(); }
};

// Tangent vector to H_P(M) at a geodesic path, in the moving-frame
// coordinates h = u^{-1} X of the base path. A tangent is determined by the
// right-derivative kicks h'(s_{i-1}+) per segment; values propagate across
// segments through the Jacobi endpoint matrices.
class PathTangent {
public:
    static PathTangent from_kicks(const GeodesicPath& sigma, const Mat& kicks);

    const GeodesicPath* base() const { return base_; }
    // h(s_i)
    Vec value(int i) const { return values_.col(i); }
    const Mat& values() const { return values_; }
    // h'(s_{i-1}+) for segment i (0-based segment index)
    Vec kick(int i) const { return kicks_.col(i); }
    const Mat& kicks() const { return kicks_; }
    int segments() const { return int(kicks_.cols()); }

    // h(s) for s inside segment i, via the segment Jacobi propagators
    Vec value_at(int segment, double s) const;

private:
    PathTangent(const GeodesicPath* base, Mat values, Mat kicks)
        : base_(base), values_(std::move(values)), kicks_(std::move(kicks)) {}
    const GeodesicPath* base_;
    Mat values_; // d x (n+1)
    Mat kicks_;  // d x n
};

// Cartan development of the piecewise-linear path b into a piecewise
// geodesic starting at o with the base frame; frames are transported in
// parallel and re-orthonormalized each segment. By default increments at or
// past the injectivity radius are rejected so that the vertex-wise
// anti-development stays exactly invertible; the development itself is
// globally defined, and integrands that never invert through vertex pairs
// (the IBP quadrature) may pass extend_past_injectivity to lift the check.
// The stored driving data remains the true anti-development either way.
GeodesicPath develop(const Manifold& m, const DrivingPath& b,
                     bool extend_past_injectivity = false);

// Inverse of develop: Delta_i b = u_{i-1}^{-1} log(x_{i-1}, x_i).
DrivingPath antidevelop(const GeodesicPath& sigma);

// Energy functionals (Riemann-sum form, exact on piecewise paths).
double energy(const DrivingPath& b);
double energy(const GeodesicPath& sigma);

// E_P(x) = sum d^2(x_{i-1}, x_i) / Delta_i s over a vertex tuple
// (x_0 := o); throws CutLocusError when a pair is too far apart.
double e_p_vertices(const Manifold& m, const Partition& p, const std::vector<Vec>& x);

// q_s(X) = int_0^s Omega_{u(r)}(b'(r), h(r)) dr, per-segment Gauss rule.
Mat q_form(const GeodesicPath& sigma, const PathTangent& X, double s, int gauss_order = 5);

// Pushforward of the development map: the tangent X = phi_* eta over sigma
// for a perturbation direction eta of the driving path, built causally from
// h'(s_{i-1}+) = eta'(s_{i-1}+) + q_{s_{i-1}}(X) b'(s_{i-1}+).
PathTangent develop_tangent(const GeodesicPath& sigma, const DrivingPath& eta,
                            int gauss_order = 5);

// (phi^* X)(s_i) = h(s_i) - int_0^{s_i} q_r(X) b'(r) dr at partition points.
std::vector<Vec> pullback_differential(const GeodesicPath& sigma, const PathTangent& X,
                                       int gauss_order = 5);

// Frame at an interior time s of the path (parallel transport of the
// vertex frame part-way along the segment).
Frame frame_along(const GeodesicPath& sigma, int segment, double s);

} // namespace pathmc
