#include "pathmc/montecarlo.hpp"

#include <cmath>
#include <thread>

#include "pathmc/stats.hpp"

namespace pathmc {

void parallel_for_replicas(std::uint64_t n, int threads,
                           const std::function<void(std::uint64_t)>& body) {
    if (threads <= 1 || n < 2) {
        for (std::uint64_t r = 0; r < n; ++r) body(r);
        return;
    }
    const int k = std::min<std::uint64_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) {
        pool.emplace_back([&, t]() {
            for (std::uint64_t r = std::uint64_t(t); r < n; r += std::uint64_t(k)) body(r);
        });
    }
    for (auto& th : pool) th.join();
}

McEstimate estimate_from_values(const std::vector<double>& values, std::uint64_t n_degenerate) {
    const MeanSe ms = mean_se(values);
    return McEstimate{ms.mean, ms.se, values.size(), n_degenerate};
}

DrivingPath sample_bp(const Partition& p, int d, const RngStream& rng) {
    DrivingPath b(p, d);
    for (int i = 0; i < p.segments(); ++i) {
        RngSequence seq = rng.segment(std::uint64_t(i));
        b.increments.col(i) = std::sqrt(p.dt(i)) * seq.gauss_vec(d);
    }
    return b;
}

std::pair<double, double> normalization_constants(const Partition& p, int d) {
    const int n = p.segments();
    double z0 = 1.0;
    for (int i = 0; i < n; ++i) z0 *= std::pow(std::sqrt(2.0 * M_PI) * p.dt(i), d);
    const double z1 = std::pow(2.0 * M_PI, 0.5 * double(d) * double(n));
    return {z0, z1};
}

McEstimate expectation_nu1(const Manifold& m, const Partition& p, const PathFunctional& f,
                           std::uint64_t n_samples, std::uint64_t seed, int threads) {
    std::vector<double> vals(n_samples);
    parallel_for_replicas(n_samples, threads, [&](std::uint64_t r) {
        const GeodesicPath sigma = develop(m, sample_bp(p, m.dim(), RngStream(seed, r)));
        vals[r] = f(sigma);
    });
    return estimate_from_values(vals);
}

namespace {

double alpha_weight(const Manifold& m, const GeodesicPath& sigma, double alpha) {
    double acc = 0.0;
    for (int i = 0; i < sigma.segments(); ++i)
        acc += (alpha * m.scalar(sigma.vertex(i)) + (1.0 - alpha) * m.scalar(sigma.vertex(i + 1))) *
               sigma.partition.dt(i);
    return std::exp(acc / 6.0);
}

} // namespace

McEstimate expectation_nu0(const Manifold& m, const Partition& p, const PathFunctional& f,
                           std::uint64_t n_samples, std::uint64_t seed,
                           std::optional<double> alpha, int threads) {
    std::vector<double> vals(n_samples);
    std::vector<unsigned char> degen(n_samples, 0);
    parallel_for_replicas(n_samples, threads, [&](std::uint64_t r) {
        const GeodesicPath sigma = develop(m, sample_bp(p, m.dim(), RngStream(seed, r)));
        const DensityReport rep = rho_p(sigma);
        degen[r] = rep.degenerate ? 1 : 0;
        double v = f(sigma) * rep.rho;
        if (alpha) v *= alpha_weight(m, sigma, *alpha);
        vals[r] = rep.degenerate ? 0.0 : v;
    });
    std::uint64_t n_deg = 0;
    for (auto flag : degen) n_deg += flag;
    return estimate_from_values(vals, n_deg);
}

TailFractions tail_fraction(const Manifold& m, const Partition& p, double epsilon,
                            std::uint64_t n_samples, std::uint64_t seed, int threads) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("tail_fraction: epsilon must be positive");
    std::vector<double> ind(n_samples), weighted(n_samples);
    std::vector<unsigned char> degen(n_samples, 0);
    parallel_for_replicas(n_samples, threads, [&](std::uint64_t r) {
        const DrivingPath b = sample_bp(p, m.dim(), RngStream(seed, r));
        bool outside = false;
        for (int i = 0; i < b.segments() && !outside; ++i)
            outside = b.increments.col(i).norm() >= epsilon;
        ind[r] = outside ? 1.0 : 0.0;
        if (outside) {
            const GeodesicPath sigma = develop(m, b);
            const DensityReport rep = rho_p(sigma);
            degen[r] = rep.degenerate ? 1 : 0;
            weighted[r] = rep.rho;
        } else {
            weighted[r] = 0.0;
        }
    });
    std::uint64_t n_deg = 0;
    for (auto flag : degen) n_deg += flag;
    TailFractions out;
    out.nu1 = estimate_from_values(ind);
    out.weighted = estimate_from_values(weighted, n_deg);
    return out;
}

WzRateResult wz_rate(const Manifold& m, const EndpointMap& f, const std::vector<int>& n_list,
                     std::uint64_t n_samples, std::uint64_t seed, int threads) {
    if (n_list.size() < 2) throw std::invalid_argument("wz_rate: need at least two partition sizes");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw std::invalid_argument("wz_rate: n_list must be increasing");
    const int n_ref = n_list.back();
    for (int n : n_list)
        if (n_ref % n != 0)
            throw std::invalid_argument("wz_rate: every n must divide the reference n");

    const Partition fine = Partition::uniform(n_ref);
    const std::size_t n_coarse = n_list.size() - 1;
    std::vector<Partition> coarse;
    coarse.reserve(n_coarse);
    for (std::size_t j = 0; j < n_coarse; ++j) coarse.push_back(Partition::uniform(n_list[j]));

    // per-(coarse level, replica) squared endpoint deviation
    std::vector<std::vector<double>> sq(n_coarse, std::vector<double>(n_samples, 0.0));
    parallel_for_replicas(n_samples, threads, [&](std::uint64_t r) {
        const DrivingPath b = sample_bp(fine, m.dim(), RngStream(seed, r));
        const GeodesicPath ref = develop(m, b);
        const Vec ref_end = f(ref.vertex(ref.segments()));
        for (std::size_t j = 0; j < n_coarse; ++j) {
            const int n = n_list[j];
            const int group = n_ref / n;
            DrivingPath bc(coarse[j], m.dim());
            for (int i = 0; i < n; ++i) {
                Vec inc = Vec::Zero(m.dim());
                for (int g = 0; g < group; ++g) inc += b.increments.col(i * group + g);
                bc.increments.col(i) = inc;
            }
            const GeodesicPath sig = develop(m, bc);
            sq[j][r] = (f(sig.vertex(sig.segments())) - ref_end).squaredNorm();
        }
    });

    WzRateResult out;
    std::vector<double> log_mesh, log_err;
    for (std::size_t j = 0; j < n_coarse; ++j) {
        const double mse = pairwise_sum(sq[j]) / double(n_samples);
        out.n_list.push_back(n_list[j]);
        out.l2_error.push_back(std::sqrt(mse));
        log_mesh.push_back(std::log(1.0 / double(n_list[j])));
        log_err.push_back(std::log(std::max(out.l2_error.back(), 1e-300)));
    }
    const LineFit fit = fit_line(log_mesh, log_err);
    out.slope = fit.slope;
    out.slope_se = fit.slope_se;
    return out;
}

GaussianIdentityResult gaussian_identity_check(const Partition& p, int d, double p_exp, double c,
                                               std::uint64_t n_samples, std::uint64_t seed,
                                               int threads) {
    double exact = 1.0;
    for (int j = 0; j < p.segments(); ++j) {
        const double q = p_exp * c * p.dt(j);
        if (q >= 1.0)
            throw DivergenceError("gaussian_identity_check: p*C*dt >= 1, expectation diverges");
        exact *= std::pow(1.0 - q, -0.5 * double(d));
    }
    std::vector<double> vals(n_samples);
    parallel_for_replicas(n_samples, threads, [&](std::uint64_t r) {
        const DrivingPath b = sample_bp(p, d, RngStream(seed, r));
        double s = 0.0;
        for (int j = 0; j < p.segments(); ++j) s += b.increments.col(j).squaredNorm();
        vals[r] = std::exp(0.5 * p_exp * c * s);
    });
    return GaussianIdentityResult{estimate_from_values(vals), exact};
}

} // namespace pathmc
