#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "rbmtrace/harness/experiment.hpp"
#include "rbmtrace/sim/rbm.hpp"
#include "rbmtrace/sim/rng.hpp"
#include "rbmtrace/subord/subordinator.hpp"

namespace rbmtrace::harness {

namespace {

enum class Estimator {
    occupation,
    trace,
    doubling_cantor,
    doubling_full,
    sub_occupation,
    sub_trace,
};

Estimator estimator_of(const std::string& preset) {
    if (preset.ends_with("-occupation"))
        return preset.starts_with("subordinated") ? Estimator::sub_occupation
                                                  : Estimator::occupation;
    if (preset.ends_with("-trace"))
        return preset.starts_with("subordinated") ? Estimator::sub_trace : Estimator::trace;
    if (preset == "doubling-cantor") return Estimator::doubling_cantor;
    if (preset == "doubling-full") return Estimator::doubling_full;
    throw std::invalid_argument("unknown preset '" + preset + "'");
}

geom::DomainPtr build_domain(const ExperimentConfig& cfg) {
    std::string kind = cfg.domain.kind;
    if (kind.empty()) {
        if (cfg.preset.starts_with("square") || cfg.preset.starts_with("doubling") ||
            cfg.preset.starts_with("subordinated"))
            kind = "square";
        else if (cfg.preset.starts_with("snowflake"))
            kind = "snowflake";
        else if (cfg.preset.starts_with("product"))
            kind = "product";
        else if (cfg.preset.starts_with("corridor"))
            kind = "corridor";
        else
            throw std::invalid_argument("no domain kind for preset '" + cfg.preset + "'");
    }
    if (kind == "square") return geom::make_square(cfg.domain.side);
    if (kind == "snowflake") return geom::make_koch_snowflake(cfg.domain.level);
    if (kind == "product")
        return geom::make_product(geom::make_koch_snowflake(cfg.domain.level),
                                  cfg.domain.height);
    if (kind == "corridor")
        return geom::make_corridor_domain(cfg.domain.generations, cfg.domain.width_exponent);
    throw std::invalid_argument("unknown domain kind '" + kind + "'");
}

double domain_extent(const geom::Domain& domain) {
    double e = domain.planar_bbox().max_extent();
    if (domain.kind() == geom::DomainKind::product)
        e = std::max(e, domain.interval().second - domain.interval().first);
    return e;
}

// Boundary contact comes in clusters lasting about eps^2 (the diffusive
// time across the eps-neighborhood); time scales below ~10 eps^2 see
// cluster interiors and read dimension 1. Cap the finest counted scale
// accordingly; the grid bound 4 dt stays as a hard floor.
int default_time_kmax(double T, double dt, double cluster_time) {
    const double floor_scale = std::max(4.0 * dt, 8.0 * cluster_time);
    const int k_grid = static_cast<int>(std::floor(std::log2(T / (4.0 * dt))));
    const int k = static_cast<int>(std::floor(std::log2(T / floor_scale)));
    return std::max(5, std::min(k, k_grid));
}

// Finest counted scale sits at the set's resolution; two extra levels
// are included because the window trims the two finest scales anyway.
int default_space_kmax(double extent, double resolution) {
    const int k = static_cast<int>(std::floor(std::log2(extent / resolution))) + 2;
    return std::clamp(k, 6, 20);
}

fracdim::DimensionEstimate fit_time_set(const sim::TimeSet& ts, const ExperimentConfig& cfg,
                                        double cluster_time) {
    const int k_min = cfg.k_min.value_or(0);
    const int k_max = cfg.k_max.value_or(default_time_kmax(ts.T(), ts.dt(), cluster_time));
    auto [scales, counts] = fracdim::box_counts_time(ts, k_min, k_max);
    std::vector<std::size_t> capacities;
    capacities.reserve(scales.size());
    for (int k = k_min; k <= k_max; ++k) capacities.push_back(std::size_t{1} << k);
    // Window overrides disable the automatic trimming.
    const bool auto_window = !cfg.k_min && !cfg.k_max;
    return fracdim::fit_loglog(scales, counts, auto_window, auto_window ? capacities
                                                                        : std::vector<std::size_t>{});
}

fracdim::DimensionEstimate fit_point_set(const std::vector<geom::Point>& pts, int dim,
                                         const ExperimentConfig& cfg, double extent,
                                         double resolution) {
    const int k_min = cfg.k_min.value_or(0);
    const int k_max = cfg.k_max.value_or(default_space_kmax(extent, resolution));
    auto [scales, counts] = fracdim::box_counts_space(pts, dim, k_min, k_max);
    if (pts.size() == 1 || scales.front() <= 0.0) {
        fracdim::DimensionEstimate est;
        est.scales = scales;
        est.counts = counts;
        est.r2 = 1.0;
        est.window_hi = scales.size() - 1;
        return est;
    }
    const bool auto_window = !cfg.k_min && !cfg.k_max;
    return fracdim::fit_loglog(scales, counts, auto_window,
                               auto_window ? fracdim::box_capacities(dim, k_min, k_max)
                                           : std::vector<std::size_t>{});
}

fracdim::DimensionEstimate zero_estimate() {
    fracdim::DimensionEstimate est;
    est.scales = {1.0, 0.5, 0.25, 0.125};
    est.counts = {1, 1, 1, 1};
    est.r2 = 1.0;
    est.window_hi = 3;
    return est;
}

PathResult run_one_path(const ExperimentConfig& cfg, const geom::DomainPtr& domain,
                        Estimator kind, int index) {
    PathResult res;
    res.index = index;
    res.seed = path_seed(cfg.master_seed, index);
    const geom::Point x0 = domain->anchor();

    switch (kind) {
        case Estimator::occupation: {
            const double eps = cfg.eps_factor * std::sqrt(cfg.dt);
            sim::TimeSet ts(cfg.T, cfg.dt);
            const std::size_t n_cells = ts.n_cells();
            sim::walk_rbm(*domain, x0, cfg.T, cfg.dt, res.seed,
                          [&](std::size_t k, const geom::Point& p) {
                              if (k < n_cells && domain->within_boundary(p, eps)) ts.mark(k);
                          });
            res.steps = n_cells;
            res.points = ts.count();
            if (res.points == 0) {
                res.empty_set = true;
                res.estimate = zero_estimate();
                break;
            }
            res.estimate = fit_time_set(ts, cfg, eps * eps);
            break;
        }
        case Estimator::trace: {
            const double eps = cfg.eps_factor * std::sqrt(cfg.dt);
            std::vector<geom::Point> pts;
            sim::walk_rbm(*domain, x0, cfg.T, cfg.dt, res.seed,
                          [&](std::size_t, const geom::Point& p) {
                              if (domain->within_boundary(p, eps))
                                  pts.push_back(domain->nearest_boundary_point(p));
                          });
            res.steps = sim::grid_steps(cfg.T, cfg.dt);
            res.points = pts.size();
            if (pts.empty()) {
                res.empty_set = true;
                res.estimate = zero_estimate();
                break;
            }
            res.estimate = fit_point_set(pts, domain->ambient_dim(), cfg,
                                         domain_extent(*domain), std::sqrt(cfg.dt));
            break;
        }
        case Estimator::doubling_cantor:
        case Estimator::doubling_full: {
            sim::TimeSet e(cfg.T, cfg.dt);
            if (kind == Estimator::doubling_full) {
                e.mark_all();
            } else {
                fracdim::CantorSpec spec{cfg.cantor.pieces, cfg.cantor.ratio,
                                         cfg.cantor.depth, cfg.T};
                e = fracdim::cantor_timeset(spec, cfg.dt);
            }
            std::vector<geom::Point> pts;
            pts.reserve(e.count());
            const std::size_t n_cells = e.n_cells();
            sim::walk_rbm(*domain, x0, cfg.T, cfg.dt, res.seed,
                          [&](std::size_t k, const geom::Point& p) {
                              if (k < n_cells && e.marked(k)) pts.push_back(p);
                          });
            res.steps = sim::grid_steps(cfg.T, cfg.dt);
            res.points = pts.size();
            // The image of one depth-limited generator interval is a
            // Brownian arc of extent ~sqrt(interval length); below that
            // scale the image reads as ambient-dimensional arcs.
            double resolution = std::sqrt(cfg.dt);
            if (kind == Estimator::doubling_cantor)
                resolution = std::max(
                    resolution,
                    std::sqrt(std::pow(cfg.cantor.ratio, cfg.cantor.depth) * cfg.T));
            res.estimate = fit_point_set(pts, domain->ambient_dim(), cfg,
                                         domain_extent(*domain), resolution);
            break;
        }
        case Estimator::sub_occupation:
        case Estimator::sub_trace: {
            const double s = cfg.s.value_or(0.9);
            const double eps = cfg.eps_factor * std::sqrt(cfg.fine_dt);
            const auto xi = subord::sample_subordinator(
                s, cfg.T, cfg.dt, sim::counter_hash(res.seed, 0x5abdull));

            // Heavy-tailed increments can shoot past any fixed budget;
            // observe the subordinated process only while the
            // underlying walk horizon stays affordable.
            const double cap_T = cfg.fine_dt * cfg.max_fine_steps;
            std::size_t usable = 0;
            while (usable < xi.values.size() && xi.values[usable] <= cap_T) ++usable;
            if (usable < 16)
                throw std::runtime_error("subordinator exceeds the walk horizon cap");

            const double max_v = xi.values[usable - 1];
            const double Tx =
                (std::floor(max_v / cfg.fine_dt) + 2.0) * cfg.fine_dt;
            const std::size_t steps_x = sim::grid_steps(Tx, cfg.fine_dt);

            std::vector<std::size_t> want(usable);
            for (std::size_t k = 0; k < usable; ++k)
                want[k] = subord::grid_index_at(xi.values[k], cfg.fine_dt, steps_x);

            std::vector<geom::Point> z;
            z.resize(usable);
            std::size_t ptr = 0;
            sim::walk_rbm(*domain, x0, Tx, cfg.fine_dt, res.seed,
                          [&](std::size_t k, const geom::Point& p) {
                              while (ptr < usable && want[ptr] == k) z[ptr++] = p;
                          });
            res.steps = steps_x;

            if (kind == Estimator::sub_occupation) {
                sim::TimeSet ts(static_cast<double>(usable) * cfg.dt, cfg.dt);
                for (std::size_t k = 0; k < std::min(usable, ts.n_cells()); ++k)
                    if (domain->within_boundary(z[k], eps)) ts.mark(k);
                res.points = ts.count();
                if (res.points == 0) {
                    res.empty_set = true;
                    res.estimate = zero_estimate();
                    break;
                }
                // The eps^2 contact-cluster duration maps through the
                // subordinator's inverse time scaling.
                res.estimate = fit_time_set(ts, cfg, std::pow(eps * eps, s));
            } else {
                std::vector<geom::Point> pts;
                for (std::size_t k = 0; k < usable; ++k)
                    if (domain->within_boundary(z[k], eps))
                        pts.push_back(domain->nearest_boundary_point(z[k]));
                res.points = pts.size();
                if (pts.empty()) {
                    res.empty_set = true;
                    res.estimate = zero_estimate();
                    break;
                }
                res.estimate = fit_point_set(pts, domain->ambient_dim(), cfg,
                                             domain_extent(*domain), std::sqrt(cfg.fine_dt));
            }
            break;
        }
    }
    return res;
}

std::string iso_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    if (cfg.paths < 1) throw std::invalid_argument("run_experiment: paths must be >= 1");
    const auto t_start = std::chrono::steady_clock::now();

    ExperimentReport report;
    report.config = cfg;
    report.preset = preset_info(cfg);
    const Estimator kind = estimator_of(cfg.preset);
    const geom::DomainPtr domain = build_domain(cfg);
    report.domain_id = domain->id();

    report.paths.resize(cfg.paths);
    std::atomic<int> next{0};
    const int n_workers =
        std::max(1, std::min(cfg.paths, cfg.threads > 0
                                            ? cfg.threads
                                            : static_cast<int>(
                                                  std::thread::hardware_concurrency())));
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= cfg.paths) return;
            try {
                report.paths[i] = run_one_path(cfg, domain, kind, i);
            } catch (const std::exception& ex) {
                report.paths[i].index = i;
                report.paths[i].seed = path_seed(cfg.master_seed, i);
                report.paths[i].error = ex.what();
            }
        }
    };
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    double sum = 0.0, sum2 = 0.0;
    for (const auto& p : report.paths) {
        if (!p.error.empty()) {
            ++report.n_failed;
            continue;
        }
        const double v = p.empty_set ? 0.0 : p.estimate.slope;
        sum += v;
        sum2 += v * v;
        ++report.n_ok;
        if (p.empty_set) ++report.n_empty;
        report.total_steps += p.steps;
    }
    if (report.n_failed * 10 > cfg.paths) {
        std::string first;
        for (const auto& p : report.paths)
            if (!p.error.empty()) {
                first = p.error;
                break;
            }
        throw std::runtime_error("run_experiment: " + std::to_string(report.n_failed) + "/" +
                                 std::to_string(cfg.paths) + " paths failed; first: " + first);
    }
    if (report.n_ok > 0) {
        report.mean = sum / report.n_ok;
        if (report.n_ok > 1) {
            const double var =
                std::max(0.0, (sum2 - sum * sum / report.n_ok) / (report.n_ok - 1));
            report.sd = std::sqrt(var);
            report.se = report.sd / std::sqrt(static_cast<double>(report.n_ok));
        }
    }
    const double above = report.mean - report.preset.predicted;
    const double below = report.preset.predicted - report.mean;
    report.pass = report.preset.exploratory ||
                  (above <= report.preset.tol_above && below <= report.preset.tol_below);

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    report.generated_at = iso_utc_now();
    return report;
}

std::string ExperimentReport::to_json_string(int indent) const {
    nlohmann::json j;
    j["config"] = nlohmann::json::parse(config.to_json_string());
    j["domain_id"] = domain_id;
    j["predicted"] = {{"value", preset.predicted},
                      {"citation", preset.citation},
                      {"proxy", "upper box-counting dimension"}};
    j["tolerance"] = {{"above", preset.tol_above}, {"below", preset.tol_below}};
    j["exploratory"] = preset.exploratory;
    auto& rows = j["paths"] = nlohmann::json::array();
    for (const auto& p : paths) {
        nlohmann::json row;
        row["index"] = p.index;
        row["seed"] = p.seed;
        row["slope"] = p.estimate.slope;
        row["stderr"] = p.estimate.stderr_;
        row["r2"] = p.estimate.r2;
        row["window"] = {p.estimate.window_lo, p.estimate.window_hi};
        row["points"] = p.points;
        row["steps"] = p.steps;
        row["empty_set"] = p.empty_set;
        if (!p.error.empty()) row["error"] = p.error;
        rows.push_back(row);
    }
    j["aggregate"] = {{"mean", mean},         {"sd", sd},
                      {"stderr", se},         {"n_ok", n_ok},
                      {"n_failed", n_failed}, {"n_empty", n_empty}};
    j["pass"] = pass;
    j["steps_total"] = total_steps;
    j["timestamp"] = {{"generated_at", generated_at}, {"wall_seconds", wall_seconds}};
    return j.dump(indent);
}

void emit_outputs(const ExperimentReport& report, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("emit_outputs: cannot create '" + dir + "': " + ec.message());

    auto open = [&](const char* name) {
        std::ofstream os(fs::path(dir) / name);
        if (!os) throw std::runtime_error("emit_outputs: cannot write '" + dir + "/" + name + "'");
        os << std::setprecision(17);
        return os;
    };

    {
        auto os = open("report.json");
        os << report.to_json_string(2) << '\n';
    }
    {
        auto os = open("loglog.csv");
        os << "path,scale,count,used\n";
        for (const auto& p : report.paths) {
            const auto& e = p.estimate;
            for (std::size_t i = 0; i < e.scales.size(); ++i)
                os << p.index << ',' << e.scales[i] << ',' << e.counts[i] << ','
                   << (i >= e.window_lo && i <= e.window_hi) << '\n';
        }
    }
    {
        auto os = open("summary.csv");
        os << "path,slope,stderr,r2,window_lo,window_hi,points,steps,empty,error\n";
        for (const auto& p : report.paths)
            os << p.index << ',' << p.estimate.slope << ',' << p.estimate.stderr_ << ','
               << p.estimate.r2 << ',' << p.estimate.window_lo << ',' << p.estimate.window_hi
               << ',' << p.points << ',' << p.steps << ',' << p.empty_set << ',' << p.error
               << '\n';
    }
    {
        auto os = open("fit.csv");
        os << "path,scale,fit_count\n";
        for (const auto& p : report.paths) {
            const auto& e = p.estimate;
            if (e.scales.empty() || !p.error.empty()) continue;
            // Reconstruct the fitted line over the used window.
            double mx = 0, my = 0;
            std::size_t n = 0;
            for (std::size_t i = e.window_lo; i <= e.window_hi && i < e.scales.size(); ++i, ++n) {
                mx += std::log(1.0 / e.scales[i]);
                my += std::log(static_cast<double>(e.counts[i]));
            }
            if (n == 0) continue;
            mx /= n;
            my /= n;
            for (std::size_t i = e.window_lo; i <= e.window_hi && i < e.scales.size(); ++i) {
                const double x = std::log(1.0 / e.scales[i]);
                os << p.index << ',' << e.scales[i] << ','
                   << std::exp(my + e.slope * (x - mx)) << '\n';
            }
        }
    }
}

std::vector<FixtureResult> run_calibration() {
    std::vector<FixtureResult> out;
    constexpr double kTol = 0.05;

    {  // middle-thirds Cantor set, depth 12
        fracdim::CantorSpec spec{2, 1.0 / 3.0, 12, 1.0};
        const auto ts = fracdim::cantor_timeset(spec, 1e-6);
        const auto [scales, counts] = fracdim::box_counts_time(ts, 0, 17);
        std::vector<std::size_t> caps;
        for (int k = 0; k <= 17; ++k) caps.push_back(std::size_t{1} << k);
        const auto est = fracdim::fit_loglog(scales, counts, true, caps);
        const double target = spec.analytic_dim();
        out.push_back({"cantor-middle-thirds", target, est.slope,
                       kTol, std::abs(est.slope - target) <= kTol});
    }
    {  // filled unit square sampled on a 512x512 grid
        std::vector<geom::Point> pts;
        pts.reserve(512 * 512);
        for (int i = 0; i < 512; ++i)
            for (int j = 0; j < 512; ++j)
                pts.push_back(geom::Point::planar((i + 0.5) / 512.0, (j + 0.5) / 512.0));
        const auto [scales, counts] = fracdim::box_counts_space(pts, 2, 0, 9);
        const auto est = fracdim::fit_loglog(scales, counts, true);
        out.push_back({"filled-square", 2.0, est.slope, kTol,
                       std::abs(est.slope - 2.0) <= kTol});
    }
    {  // Koch snowflake level-7 boundary vertices
        const auto snow = geom::make_koch_snowflake(7);
        std::vector<geom::Point> pts;
        pts.reserve(snow->vertices().size());
        for (const auto& v : snow->vertices()) pts.push_back(geom::Point::from_xy(v));
        const auto [scales, counts] = fracdim::box_counts_space(pts, 2, 0, 9);
        const auto est = fracdim::fit_loglog(scales, counts, true);
        const double target = 1.2618595071429148;
        out.push_back({"koch-vertices-level7", target, est.slope, kTol,
                       std::abs(est.slope - target) <= kTol});
    }
    return out;
}

}  // namespace rbmtrace::harness
