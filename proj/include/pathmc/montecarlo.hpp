#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pathmc/jacobi.hpp"
#include "pathmc/manifold.hpp"
#include "pathmc/partition.hpp"
#include "pathmc/paths.hpp"
#include "pathmc/rng.hpp"
#include "pathmc/types.hpp"

namespace pathmc {

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t n_degenerate = 0;
};

using PathFunctional = std::function<double(const GeodesicPath&)>;

// One draw of the piecewise-linear Brownian skeleton B_P: the increments are
// independent centered Gaussians with covariance Delta_i s * I, which is
// exactly the law the measure nu_P^1 pulls back to.
DrivingPath sample_bp(const Partition& p, int d, const RngStream& rng);

// Normalization constants of Definition: Z0 = prod (sqrt(2 pi) Delta_i s)^d,
// Z1 = (2 pi)^{d n / 2}. Reporting values; the sampler absorbs them.
std::pair<double, double> normalization_constants(const Partition& p, int d);

// Monte Carlo mean of f under nu_P^1, i.e. of f(develop(B_P)).
McEstimate expectation_nu1(const Manifold& m, const Partition& p, const PathFunctional& f,
                           std::uint64_t n_samples, std::uint64_t seed, int threads = 1);

// Monte Carlo mean of f under nu_P^0 by importance weighting with rho_P.
// With `alpha`, the weight gains the curvature factor
//   chi = exp((1/6) sum (alpha Scal(x_{i-1}) + (1-alpha) Scal(x_i)) Delta_i s),
// which cancels the scalar-curvature deficit in the limit. Degenerate
// (rho = 0) samples stay in the average with weight zero and are counted.
McEstimate expectation_nu0(const Manifold& m, const Partition& p, const PathFunctional& f,
                           std::uint64_t n_samples, std::uint64_t seed,
                           std::optional<double> alpha = std::nullopt, int threads = 1);

// Empirical nu_P^1 probability (and rho_P-weighted mass) of the complement
// of H_P^epsilon(M), i.e. of {some |Delta_i b| >= epsilon}.
struct TailFractions {
    McEstimate nu1;
    McEstimate weighted;
};
TailFractions tail_fraction(const Manifold& m, const Partition& p, double epsilon,
                            std::uint64_t n_samples, std::uint64_t seed, int threads = 1);

// Wong-Zakai style self-refinement experiment: a fine Brownian skeleton per
// sample is developed under coarse sub-partitions and compared with the
// development under the finest partition (the reference); returns the
// fitted slope of log L2 endpoint error against log mesh.
struct WzRateResult {
    std::vector<int> n_list;      // coarse partitions (reference excluded)
    std::vector<double> l2_error; // sqrt of mean squared endpoint deviation
    double slope = 0.0;           // of log error vs log mesh
    double slope_se = 0.0;
};
using EndpointMap = std::function<Vec(const Vec&)>;
WzRateResult wz_rate(const Manifold& m, const EndpointMap& f, const std::vector<int>& n_list,
                     std::uint64_t n_samples, std::uint64_t seed, int threads = 1);

// Monte Carlo check of E exp((p/2) C sum |Delta_j B|^2) against the closed
// form prod (1 - p C Delta_j s)^{-d/2}; throws DivergenceError when some
// p C Delta_j s >= 1.
struct GaussianIdentityResult {
    McEstimate mc;
    double exact = 0.0;
};
GaussianIdentityResult gaussian_identity_check(const Partition& p, int d, double p_exp, double c,
                                               std::uint64_t n_samples, std::uint64_t seed,
                                               int threads = 1);

// Parallel map over replica indices; results land in a replica-indexed
// vector so the subsequent reduction is independent of the worker count.
void parallel_for_replicas(std::uint64_t n, int threads,
                           const std::function<void(std::uint64_t)>& body);

McEstimate estimate_from_values(const std::vector<double>& values, std::uint64_t n_degenerate = 0);

} // namespace pathmc
