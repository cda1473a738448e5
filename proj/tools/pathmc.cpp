// pathmc: experiment runner for the geometric path-space Monte Carlo library.
// Subcommands bind the library modules behind reproducible, configured runs
// emitting CSV artifacts plus a JSON run manifest.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pathmc/heat.hpp"
#include "pathmc/ibp.hpp"
#include "pathmc/io.hpp"
#include "pathmc/jacobi.hpp"
#include "pathmc/montecarlo.hpp"
#include "pathmc/stats.hpp"
#include "pathmc/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pathmc;

namespace {

struct RunContext {
    json config;
    std::string subcommand;
    fs::path out_dir;
    std::uint64_t seed = 0;
    int threads = 1;
    double budget_seconds = 600.0;
    bool emit_timing = false;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    std::vector<fs::path> outputs;

    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    // abort when the projection from the completed fraction exceeds the cap
    void check_budget(double done_fraction) const {
        if (done_fraction <= 0.0) return;
        const double projected = elapsed() / done_fraction;
        if (projected > budget_seconds) {
            char msg[160];
            std::snprintf(msg, sizeof msg,
                          "projected runtime %.1f s exceeds the budget of %.1f s", projected,
                          budget_seconds);
            throw ConfigError(msg);
        }
    }
    fs::path artifact(const std::string& name) {
        fs::path p = out_dir / name;
        outputs.push_back(p);
        return p;
    }
};

Partition partition_from_config(const json& cfg) {
    if (!cfg.contains("partition")) return Partition::uniform(16);
    const json& p = cfg.at("partition");
    const std::string kind = p.value("kind", "uniform");
    if (kind == "uniform") return Partition::uniform(p.value("n", 16));
    if (kind == "explicit") return Partition(p.at("times").get<std::vector<double>>());
    throw ConfigError("partition.kind must be 'uniform' or 'explicit'");
}

std::vector<int> n_list_from_config(const json& cfg, std::vector<int> fallback) {
    if (cfg.contains("n_list")) return cfg.at("n_list").get<std::vector<int>>();
    if (cfg.contains("partition")) return {partition_from_config(cfg).segments()};
    return fallback;
}

// path observables by name
PathFunctional make_observable(const std::string& name, const Manifold& m) {
    const int last = m.ambient_dim() - 1;
    if (name == "one") return [](const GeodesicPath&) { return 1.0; };
    if (name == "endpoint_height")
        return [last](const GeodesicPath& s) { return s.vertex(s.segments())[last]; };
    if (name == "endpoint_sqnorm")
        return [](const GeodesicPath& s) { return s.vertex(s.segments()).squaredNorm(); };
    if (name == "endpoint_x0")
        return [](const GeodesicPath& s) { return s.vertex(s.segments())[0]; };
    throw ConfigError("unknown observable '" + name + "'");
}

Vec observable_axis(const std::string& name, const Manifold& m) {
    if (name == "endpoint_height") return Vec::Unit(m.ambient_dim(), m.ambient_dim() - 1);
    if (name == "endpoint_x0") return Vec::Unit(m.ambient_dim(), 0);
    throw ConfigError("observable '" + name + "' is not linear in the endpoint");
}

void write_manifest(RunContext& ctx) {
    json manifest;
    manifest["subcommand"] = ctx.subcommand;
    manifest["config"] = ctx.config;
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(ctx.config.dump())));
    manifest["config_hash"] = hash;
    manifest["seed"] = ctx.seed;
    manifest["threads"] = ctx.threads;
    manifest["library_version"] = kVersion;
    manifest["runtime_seconds"] = ctx.elapsed();
    std::vector<std::string> names;
    for (const auto& p : ctx.outputs) names.push_back(p.filename().string());
    manifest["outputs"] = names;
    std::ofstream out(ctx.out_dir / (ctx.subcommand + "_manifest.json"));
    out << manifest.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// subcommands

void run_sample(RunContext& ctx) {
    auto m = make_manifold(ctx.config.value("manifold", "sphere-2"));
    const Partition p = partition_from_config(ctx.config);
    const std::uint64_t n_samples = ctx.config.value("n_samples", 100);

    std::ofstream paths(ctx.artifact("samples.jsonl"));
    const bool emit_vertices = ctx.config.value("emit_vertices", true);
    std::optional<CsvWriter> vertices;
    if (emit_vertices) {
        std::vector<std::string> header{"sample_id", "i", "s"};
        for (int a = 0; a < m->ambient_dim(); ++a) header.push_back("x" + std::to_string(a));
        vertices.emplace(ctx.artifact("vertices.csv").string(), header);
    }
    for (std::uint64_t r = 0; r < n_samples; ++r) {
        const DrivingPath b = sample_bp(p, m->dim(), RngStream(ctx.seed, r));
        paths << driving_path_to_json(b).dump() << "\n";
        if (vertices) {
            const GeodesicPath sigma = develop(*m, b);
            for (int i = 0; i <= sigma.segments(); ++i) {
                std::vector<double> row{double(r), double(i), p.time(i)};
                for (int a = 0; a < m->ambient_dim(); ++a) row.push_back(sigma.vertices(a, i));
                vertices->row(row);
            }
        }
        if (r == 99 || (r > 0 && r % 5000 == 0))
            ctx.check_budget(double(r + 1) / double(n_samples));
    }
}

void run_density(RunContext& ctx) {
    auto m = make_manifold(ctx.config.value("manifold", "sphere-2"));
    const std::vector<int> ns = n_list_from_config(ctx.config, {8, 16, 32, 64});
    const std::uint64_t n_samples = ctx.config.value("n_samples", 200000);
    const std::string obs_name = ctx.config.value("observable", "one");
    const PathFunctional f = make_observable(obs_name, *m);
    const std::string measure = ctx.config.value("measure", "nu0");
    if (measure != "nu0" && measure != "nu1")
        throw ConfigError("measure must be 'nu0' or 'nu1'");
    std::optional<double> alpha;
    if (ctx.config.contains("alpha") && !ctx.config.at("alpha").is_null())
        alpha = ctx.config.at("alpha").get<double>();

    std::vector<std::string> header{"n",         "mesh",         "estimate", "std_error",
                                    "n_samples", "n_degenerate"};
    if (ctx.emit_timing) header.push_back("wall_time_s");
    CsvWriter csv(ctx.artifact("density.csv").string(), header);

    const bool emit_samples = ctx.config.value("emit_samples", false);
    for (std::size_t j = 0; j < ns.size(); ++j) {
        const Partition p = Partition::uniform(ns[j]);
        const auto cell_start = std::chrono::steady_clock::now();
        const McEstimate est =
            measure == "nu1"
                ? expectation_nu1(*m, p, f, n_samples, ctx.seed, ctx.threads)
                : expectation_nu0(*m, p, f, n_samples, ctx.seed, alpha, ctx.threads);
        const double cell_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - cell_start).count();
        std::vector<double> row{double(ns[j]), p.mesh(),          est.mean,
                                est.std_error, double(est.n_samples), double(est.n_degenerate)};
        if (ctx.emit_timing) row.push_back(cell_s);
        csv.row(row);
        if (emit_samples && j == 0) {
            CsvWriter per(ctx.artifact("density_samples.csv").string(),
                          {"sample_id", "rho", "S_P", "R_P", "W_P", "degenerate_flag"});
            const std::uint64_t dump_n = std::min<std::uint64_t>(n_samples, 10000);
            for (std::uint64_t r = 0; r < dump_n; ++r) {
                const GeodesicPath sigma = develop(*m, sample_bp(p, m->dim(), RngStream(ctx.seed, r)));
                const DensityReport rep = rho_p(sigma);
                per.row({double(r), rep.rho, rep.S_P, rep.R_P, rep.W_P,
                         rep.degenerate ? 1.0 : 0.0});
            }
        }
        ctx.check_budget(double(j + 1) / double(ns.size()));
    }
}

void run_heat(RunContext& ctx) {
    auto m = make_manifold(ctx.config.value("manifold", "sphere-2"));
    const double s_total = ctx.config.value("s_total", 0.5);
    const std::vector<int> ns = n_list_from_config(ctx.config, {4, 8, 16, 32, 64});
    std::vector<double> kappas{1.0 / 12.0, 0.0};
    if (ctx.config.contains("kappa_list"))
        kappas = ctx.config.at("kappa_list").get<std::vector<double>>();
    else if (ctx.config.contains("kappa"))
        kappas = {ctx.config.at("kappa").get<double>()};
    const json grid_cfg = ctx.config.value("grid", json::object());
    const int res_theta = grid_cfg.value("res_theta", 64);
    const int res_phi = grid_cfg.value("res_phi", 128);

    std::vector<std::string> header{"kappa", "n", "sup_error", "l2_error"};
    if (ctx.emit_timing) header.push_back("runtime_s");
    CsvWriter csv(ctx.artifact("heat.csv").string(), header);

    Vec f_nodes, reference;
    double f_sup = 1.0, f_l2 = 1.0;
    const int cells = int(kappas.size() * ns.size());
    int done = 0;
    for (double kappa : kappas) {
        for (int n : ns) {
            const auto cell_start = std::chrono::steady_clock::now();
            HeatKernelGrid grid = build_grid(*m, res_theta, res_phi, s_total / double(n), kappa);
            if (f_nodes.size() == 0) {
                f_nodes.resize(grid.size());
                for (int i = 0; i < grid.size(); ++i)
                    f_nodes[i] = grid.nodes(m->ambient_dim() - 1, i);
                reference = reference_heat(grid, f_nodes, s_total);
                f_sup = f_nodes.cwiseAbs().maxCoeff();
                f_l2 = std::sqrt((grid.weights.array() * f_nodes.array().square()).sum());
            }
            const Vec out = q_iterate(grid, f_nodes, n, s_total);
            const Vec diff = out - reference;
            const double sup_err = diff.cwiseAbs().maxCoeff() / f_sup;
            const double l2_err =
                std::sqrt((grid.weights.array() * diff.array().square()).sum()) / f_l2;
            const double cell_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - cell_start)
                    .count();
            std::vector<double> row{kappa, double(n), sup_err, l2_err};
            if (ctx.emit_timing) row.push_back(cell_s);
            csv.row(row);
            ++done;
            ctx.check_budget(double(done) / double(cells));
        }
    }
}

void run_ibp_finite(RunContext& ctx) {
    auto m = make_manifold(ctx.config.value("manifold", "sphere-2"));
    const std::vector<int> ns = n_list_from_config(ctx.config, {1, 2});
    const std::string obs = ctx.config.value("observable", "endpoint_x0");
    const std::string mode_name = ctx.config.value("ibp_mode", "quadrature");
    std::vector<double> kp_cfg =
        ctx.config.value("k_prime", std::vector<double>{1.0, 0.5});
    Vec kp(m->dim());
    for (int a = 0; a < m->dim(); ++a)
        kp[a] = a < int(kp_cfg.size()) ? kp_cfg[static_cast<std::size_t>(a)] : 0.0;

    CsvWriter csv(ctx.artifact("ibp_finite.csv").string(),
                  {"mode", "n", "lhs", "rhs", "residual", "se"});
    const EndpointLinear F(observable_axis(obs, *m));
    for (std::size_t j = 0; j < ns.size(); ++j) {
        const Partition p = Partition::uniform(ns[j]);
        IbpOptions opts;
        opts.mode = mode_name == "mc" ? IbpMode::Mc : IbpMode::Quadrature;
        opts.gauss_hermite_order = ctx.config.value("gh_order", 20);
        opts.n_samples = ctx.config.value("n_samples", 100000);
        opts.seed = ctx.seed;
        opts.fd_step = ctx.config.value("fd_step", 1e-5);
        opts.threads = ctx.threads;
        const IbpResult res = finite_ibp_check(*m, p, F, DirectionSpec::constant(p, kp), opts);
        csv.row({opts.mode == IbpMode::Mc ? 1.0 : 0.0, double(ns[j]), res.lhs, res.rhs,
                 res.residual, res.se});
        ctx.check_budget(double(j + 1) / double(ns.size()));
    }
}

void run_ibp_limit(RunContext& ctx) {
    auto m = make_manifold(ctx.config.value("manifold", "sphere-2"));
    const std::string obs = ctx.config.value("observable", "endpoint_height");
    const std::uint64_t n_samples = ctx.config.value("n_samples", 100000);
    std::vector<double> kp_cfg = ctx.config.value("k_prime", std::vector<double>{1.0, 0.0});
    Vec kp(m->dim());
    for (int a = 0; a < m->dim(); ++a)
        kp[a] = a < int(kp_cfg.size()) ? kp_cfg[static_cast<std::size_t>(a)] : 0.0;
    const std::string mode = ctx.config.value("mode", "identity");

    if (mode == "z-rate") {
        // sup-norm distance of the k-transport field to the z-field solution
        // along sampled paths, per mesh level
        if (!(m->constant_curvature().has_value() && *m->constant_curvature() == 1.0))
            throw ConfigError("z-rate mode needs the unit sphere (closed-form z)");
        const std::vector<int> ns = n_list_from_config(ctx.config, {8, 16, 32, 64, 128});
        CsvWriter csv(ctx.artifact("kp_z_rate.csv").string(),
                      {"n", "mesh", "sup_error", "n_samples"});
        const double dm1 = double(m->dim() - 1);
        for (std::size_t j = 0; j < ns.size(); ++j) {
            const Partition p = Partition::uniform(ns[j]);
            const DirectionSpec k = DirectionSpec::constant(p, kp);
            std::vector<double> sups(n_samples);
            parallel_for_replicas(n_samples, ctx.threads, [&](std::uint64_t r) {
                const GeodesicPath sigma =
                    develop(*m, sample_bp(p, m->dim(), RngStream(ctx.seed, r)));
                const PathTangent h = kp_transport(sigma, k);
                double sup = 0.0;
                for (int i = 0; i <= p.segments(); ++i) {
                    const double w = (1.0 - std::exp(-0.5 * dm1 * p.time(i))) * 2.0 / dm1;
                    sup = std::max(sup, (h.value(i) - w * kp).norm());
                }
                sups[r] = sup;
            });
            csv.row({double(ns[j]), p.mesh(), estimate_from_values(sups).mean,
                     double(n_samples)});
            ctx.check_budget(double(j + 1) / double(ns.size()));
        }
        return;
    }

    const Partition p = ctx.config.contains("partition") ? partition_from_config(ctx.config)
                                                         : Partition::uniform(100);
    CsvWriter csv(ctx.artifact("ibp_limit.csv").string(),
                  {"mode", "n", "lhs", "rhs", "residual", "se"});
    const EndpointLinear F(observable_axis(obs, *m));
    const IbpResult res = limit_ibp_check(*m, p, F, DirectionSpec::constant(p, kp), n_samples,
                                          ctx.seed, ctx.threads);
    csv.row({2.0, double(p.segments()), res.lhs, res.rhs, res.residual, res.se});
}

void run_wz_rate(RunContext& ctx) {
    auto m = make_manifold(ctx.config.value("manifold", "sphere-2"));
    const std::vector<int> ns = n_list_from_config(ctx.config, {8, 16, 32, 64, 128});
    const std::uint64_t n_samples = ctx.config.value("n_samples", 4000);
    const WzRateResult res =
        wz_rate(*m, [](const Vec& x) { return x; }, ns, n_samples, ctx.seed, ctx.threads);
    std::vector<std::string> header{"n", "mesh", "l2_error", "n_samples"};
    CsvWriter csv(ctx.artifact("wz_rate.csv").string(), header);
    for (std::size_t j = 0; j < res.n_list.size(); ++j)
        csv.row({double(res.n_list[j]), 1.0 / double(res.n_list[j]), res.l2_error[j],
                 double(n_samples)});
    json extra;
    extra["slope"] = res.slope;
    extra["slope_se"] = res.slope_se;
    ctx.config["result"] = extra;
}

void run_tails(RunContext& ctx) {
    auto m = make_manifold(ctx.config.value("manifold", "flat-2"));
    const std::vector<int> ns = n_list_from_config(ctx.config, {8, 16, 32, 64});
    const double epsilon = ctx.config.value("epsilon", 0.5);
    const std::uint64_t n_samples = ctx.config.value("n_samples", 100000);

    std::vector<std::string> header{"n",      "mesh",          "frac_nu1",  "se_nu1",
                                    "frac_w", "se_w",          "n_samples", "n_degenerate"};
    if (ctx.emit_timing) header.push_back("wall_time_s");
    CsvWriter csv(ctx.artifact("tails.csv").string(), header);
    for (std::size_t j = 0; j < ns.size(); ++j) {
        const auto cell_start = std::chrono::steady_clock::now();
        const Partition p = Partition::uniform(ns[j]);
        const TailFractions tf = tail_fraction(*m, p, epsilon, n_samples, ctx.seed, ctx.threads);
        const double cell_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - cell_start).count();
        std::vector<double> row{double(ns[j]),       p.mesh(),
                                tf.nu1.mean,         tf.nu1.std_error,
                                tf.weighted.mean,    tf.weighted.std_error,
                                double(n_samples),   double(tf.weighted.n_degenerate)};
        if (ctx.emit_timing) row.push_back(cell_s);
        csv.row(row);
        ctx.check_budget(double(j + 1) / double(ns.size()));
    }
}

void run_identities(RunContext& ctx) {
    CsvWriter csv(ctx.artifact("identities.csv").string(),
                  {"check", "value", "target", "error", "pass"});
    // determinant identity and remainder bound on random contractions
    {
        std::mt19937_64 gen(ctx.seed);
        double max_err = 0.0;
        int bound_violations = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            const int d = 2 + trial % 3;
            Mat U = Mat::NullaryExpr(d, d, [&](Eigen::Index, Eigen::Index) {
                return std::uniform_real_distribution<double>(-1.0, 1.0)(gen);
            });
            U *= 0.5 / std::max(operator_norm(U), 1e-12);
            const auto [det, psi] = psi_det(U);
            max_err = std::max(max_err, std::abs(det - std::exp(-U.trace() + psi)));
            const double nu = operator_norm(U);
            if (std::abs(psi) > double(d) * nu * nu / (1.0 - nu) + 1e-14) ++bound_violations;
        }
        csv.row({0.0, max_err, 0.0, max_err, max_err <= 1e-12 ? 1.0 : 0.0});
        csv.row({1.0, double(bound_violations), 0.0, double(bound_violations),
                 bound_violations == 0 ? 1.0 : 0.0});
    }
    // Gaussian exponential moment against the product closed form
    {
        const Partition p = partition_from_config(ctx.config);
        const int d = ctx.config.value("d", 2);
        const double pexp = ctx.config.value("p", 0.5);
        const double c = ctx.config.value("C", 1.0);
        const std::uint64_t n_samples = ctx.config.value("n_samples", 200000);
        const GaussianIdentityResult res =
            gaussian_identity_check(p, d, pexp, c, n_samples, ctx.seed, ctx.threads);
        const double err = std::abs(res.mc.mean - res.exact);
        csv.row({2.0, res.mc.mean, res.exact, err, err <= 3.0 * res.mc.std_error ? 1.0 : 0.0});
    }
    // segment expansion remainder bound on random sphere segments
    {
        Sphere sph(2);
        std::mt19937_64 gen(ctx.seed + 1);
        std::normal_distribution<double> g;
        int violations = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            Vec db(2);
            db << g(gen), g(gen);
            db *= std::uniform_real_distribution<double>(0.01, 0.8)(gen) / db.norm();
            const double ds = std::uniform_real_distribution<double>(0.05, 0.5)(gen);
            const Frame u{sph.base_point(), sph.base_frame()};
            const SegmentJacobi sj = segment_jacobi(sph, u, db, ds);
            const double r = db.norm();
            const Mat E = sj.Z / ds - Mat::Identity(2, 2) -
                          (1.0 / 6.0) * (db * db.transpose() - r * r * Mat::Identity(2, 2));
            const double bound = (1.0 / 6.0) * (2.0 * r * r * r + 0.5 * r * r * r * r) * std::cosh(r);
            if (operator_norm(E) > bound + 1e-14) ++violations;
        }
        csv.row({3.0, double(violations), 0.0, double(violations), violations == 0 ? 1.0 : 0.0});
    }
}

// ---------------------------------------------------------------------------
// summarize

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    CsvTable t;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (line_no == 1) {
            t.header = cells;
            continue;
        }
        if (cells.size() != t.header.size())
            throw std::runtime_error("parse error at " + path.string() + ":" +
                                     std::to_string(line_no) + ": expected " +
                                     std::to_string(t.header.size()) + " columns, got " +
                                     std::to_string(cells.size()));
        std::vector<double> row;
        for (const std::string& c : cells) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(c, &used));
                if (used != c.size()) throw std::invalid_argument(c);
            } catch (...) {
                throw std::runtime_error("parse error at " + path.string() + ":" +
                                         std::to_string(line_no) + ": bad number '" + c + "'");
            }
        }
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) throw std::runtime_error("parse error at " + path.string() + ":1: empty file");
    return t;
}

int column_of(const CsvTable& t, const std::string& name) {
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (t.header[i] == name) return int(i);
    return -1;
}

json fit_series(const std::vector<double>& x, const std::vector<double>& y, bool log_x,
                bool log_y) {
    json out;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (log_y && !(y[i] > 0.0)) continue;
        xs.push_back(log_x ? std::log(x[i]) : x[i]);
        ys.push_back(log_y ? std::log(y[i]) : y[i]);
    }
    const LineFit fit = fit_line(xs, ys);
    if (!fit.valid) {
        out["slope"] = nullptr;
        return out;
    }
    out["slope"] = fit.slope;
    out["slope_se"] = fit.slope_se;
    out["ci95"] = {fit.slope - 2.0 * fit.slope_se, fit.slope + 2.0 * fit.slope_se};
    out["points"] = fit.n;
    return out;
}

json summarize_file(const fs::path& path, double epsilon) {
    const CsvTable t = read_csv(path);
    json out;
    out["file"] = path.string();

    if (column_of(t, "kappa") >= 0 && column_of(t, "sup_error") >= 0) {
        out["schema"] = "heat";
        const int ck = column_of(t, "kappa"), cn = column_of(t, "n"),
                  ce = column_of(t, "sup_error");
        std::vector<double> kappas;
        for (const auto& r : t.rows)
            if (std::find(kappas.begin(), kappas.end(), r[static_cast<std::size_t>(ck)]) == kappas.end())
                kappas.push_back(r[static_cast<std::size_t>(ck)]);
        json fits = json::array();
        for (double kap : kappas) {
            std::vector<double> ns, errs;
            for (const auto& r : t.rows)
                if (r[static_cast<std::size_t>(ck)] == kap) {
                    ns.push_back(r[static_cast<std::size_t>(cn)]);
                    errs.push_back(r[static_cast<std::size_t>(ce)]);
                }
            json f = fit_series(ns, errs, true, true);
            f["kappa"] = kap;
            if (std::abs(kap - 1.0 / 12.0) < 1e-12 && !f["slope"].is_null())
                f["pass_slope_in_[-1.3,-0.7]"] =
                    f["slope"].get<double>() >= -1.3 && f["slope"].get<double>() <= -0.7;
            fits.push_back(f);
        }
        out["fits"] = fits;
    } else if (column_of(t, "frac_nu1") >= 0) {
        out["schema"] = "tails";
        const int cn = column_of(t, "n"), cf = column_of(t, "frac_nu1");
        std::vector<double> ns, fr;
        for (const auto& r : t.rows) {
            ns.push_back(r[static_cast<std::size_t>(cn)]);
            fr.push_back(r[static_cast<std::size_t>(cf)]);
        }
        json f = fit_series(ns, fr, false, true); // log frac vs 1/mesh
        if (!f["slope"].is_null())
            f["pass_slope_le_-eps^2/8"] = f["slope"].get<double>() <= -epsilon * epsilon / 8.0;
        out["fit"] = f;
    } else if (column_of(t, "sup_error") >= 0 && column_of(t, "mesh") >= 0) {
        out["schema"] = "kp_z_rate";
        const int cm = column_of(t, "mesh"), ce = column_of(t, "sup_error");
        std::vector<double> mesh, errs;
        for (const auto& r : t.rows) {
            mesh.push_back(r[static_cast<std::size_t>(cm)]);
            errs.push_back(r[static_cast<std::size_t>(ce)]);
        }
        json f = fit_series(mesh, errs, true, true);
        if (!f["slope"].is_null()) f["pass_slope_ge_0.4"] = f["slope"].get<double>() >= 0.4;
        out["fit"] = f;
    } else if (column_of(t, "l2_error") >= 0 && column_of(t, "mesh") >= 0) {
        out["schema"] = "wz_rate";
        const int cm = column_of(t, "mesh"), ce = column_of(t, "l2_error");
        std::vector<double> mesh, errs;
        for (const auto& r : t.rows) {
            mesh.push_back(r[static_cast<std::size_t>(cm)]);
            errs.push_back(r[static_cast<std::size_t>(ce)]);
        }
        json f = fit_series(mesh, errs, true, true);
        if (!f["slope"].is_null()) f["pass_slope_ge_0.4"] = f["slope"].get<double>() >= 0.4;
        out["fit"] = f;
    } else if (column_of(t, "estimate") >= 0) {
        out["schema"] = "density";
        const int cn = column_of(t, "n"), ce = column_of(t, "estimate"),
                  cs = column_of(t, "std_error");
        const double target = std::exp(-1.0 / 3.0);
        json rows = json::array();
        bool monotone = true;
        double prev = 1e300;
        for (const auto& r : t.rows) {
            const double bias = std::abs(r[static_cast<std::size_t>(ce)] - target);
            json jr;
            jr["n"] = r[static_cast<std::size_t>(cn)];
            jr["estimate"] = r[static_cast<std::size_t>(ce)];
            jr["abs_bias_vs_exp(-1/3)"] = bias;
            jr["within_3se"] = bias <= 3.0 * r[static_cast<std::size_t>(cs)];
            rows.push_back(jr);
            if (bias > prev) monotone = false;
            prev = bias;
        }
        out["rows"] = rows;
        out["bias_decreasing"] = monotone;
    } else {
        out["schema"] = "unknown";
    }
    return out;
}

int run_summarize(const std::vector<std::string>& files, double epsilon,
                  const std::string& out_path) {
    json report = json::array();
    for (const std::string& f : files) report.push_back(summarize_file(f, epsilon));
    const std::string dump = report.dump(2);
    if (out_path.empty()) {
        std::cout << dump << "\n";
    } else {
        std::ofstream out(out_path);
        out << dump << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"geometric path-space Monte Carlo experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", summarize_out;
    std::optional<std::uint64_t> seed_flag;
    int threads = 1;
    std::vector<std::string> csv_files;
    double epsilon = 0.5;

    const std::vector<std::string> run_names{"sample",    "density", "heat", "ibp-finite",
                                             "ibp-limit", "wz-rate", "tails", "identities"};
    std::vector<CLI::App*> run_cmds;
    for (const std::string& name : run_names) {
        CLI::App* cmd = app.add_subcommand(name);
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--seed", seed_flag, "master seed (overrides config)");
        cmd->add_option("--threads", threads, "worker count (1 = bit-reproducible reference)");
        cmd->add_option("--out", out_dir, "output directory");
        run_cmds.push_back(cmd);
    }
    CLI::App* sum_cmd = app.add_subcommand("summarize", "fit convergence slopes from run CSVs");
    sum_cmd->add_option("csv", csv_files, "CSV files produced by run subcommands")->required();
    sum_cmd->add_option("--epsilon", epsilon, "epsilon for the tail-bound threshold");
    sum_cmd->add_option("--out", summarize_out, "write the JSON report here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sum_cmd->parsed()) return run_summarize(csv_files, epsilon, summarize_out);

        RunContext ctx;
        for (std::size_t i = 0; i < run_cmds.size(); ++i)
            if (run_cmds[i]->parsed()) ctx.subcommand = run_names[i];

        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot open config file " + config_path);
            in >> ctx.config;
        } else {
            ctx.config = json::object();
        }
        ctx.out_dir = out_dir;
        fs::create_directories(ctx.out_dir);
        ctx.seed = ctx.config.value("seed", std::uint64_t(0));
        if (const char* env = std::getenv("PATHMC_SEED")) ctx.seed = std::stoull(env);
        if (seed_flag) ctx.seed = *seed_flag;
        ctx.config["seed"] = ctx.seed;
        ctx.threads = threads;
        ctx.budget_seconds = ctx.config.value("budget_seconds", 600.0);
        ctx.emit_timing = ctx.config.value("emit_timing", false);

        try {
            if (ctx.subcommand == "sample") run_sample(ctx);
            else if (ctx.subcommand == "density") run_density(ctx);
            else if (ctx.subcommand == "heat") run_heat(ctx);
            else if (ctx.subcommand == "ibp-finite") run_ibp_finite(ctx);
            else if (ctx.subcommand == "ibp-limit") run_ibp_limit(ctx);
            else if (ctx.subcommand == "wz-rate") run_wz_rate(ctx);
            else if (ctx.subcommand == "tails") run_tails(ctx);
            else if (ctx.subcommand == "identities") run_identities(ctx);
            write_manifest(ctx);
        } catch (...) {
            // remove partial artifacts so failed runs leave nothing behind
            for (const fs::path& p : ctx.outputs) {
                std::error_code ec;
                fs::remove(p, ec);
            }
            throw;
        }
    } catch (const std::exception& e) {
        std::cerr << "pathmc: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
