#include "rbmtrace/sim/rbm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "rbmtrace/sim/rng.hpp"

namespace rbmtrace::sim {

double fold_1d(double b, double a0, double a1) {
    if (!(a0 < a1)) throw std::invalid_argument("fold_1d: degenerate interval");
    return geom::detail::fold_interval(b, a0, a1);
}

namespace {

constexpr double kMaxDt = 1e-3;
constexpr double kMaxSteps = 1e8;

void check_sim_args(const geom::Domain& domain, const geom::Point& x0, double T, double dt) {
    if (!(dt > 0.0) || dt > kMaxDt)
        throw std::invalid_argument("simulate_rbm: dt must be in (0, 1e-3]");
    if (!(T > 0.0) || T / dt > kMaxSteps)
        throw std::invalid_argument("simulate_rbm: step count exceeds practical bound");
    if (x0.dim != domain.ambient_dim())
        throw std::invalid_argument("simulate_rbm: start point dimension mismatch");
    if (!domain.in_closure(x0))
        throw std::invalid_argument("simulate_rbm: start point outside the domain closure");
}

}  // namespace

void walk_rbm(const geom::Domain& domain, const geom::Point& x0, double T, double dt,
              std::uint64_t seed,
              const std::function<void(std::size_t, const geom::Point&)>& visit) {
    check_sim_args(domain, x0, T, dt);
    const std::size_t steps = grid_steps(T, dt);
    const double sdt = std::sqrt(dt);
    const GaussianStream rng(seed);

    if (domain.ambient_dim() == 2) {
        geom::Vec2 x = x0.xy();
        visit(0, geom::Point::from_xy(x));
        for (std::size_t k = 0; k < steps; ++k) {
            const geom::Vec2 prop{x.x + sdt * rng.normal(k, 0), x.y + sdt * rng.normal(k, 1)};
            x = domain.reflect_planar(x, prop);
            visit(k + 1, geom::Point::from_xy(x));
        }
        return;
    }

    // Product domain: reflected planar walk plus an exactly folded
    // interval coordinate driven by the running unreflected sum.
    const auto [z0, z1] = domain.interval();
    geom::Vec2 x = x0.xy();
    double z_raw = x0.z;
    visit(0, geom::Point::spatial(x.x, x.y, fold_1d(z_raw, z0, z1)));
    for (std::size_t k = 0; k < steps; ++k) {
        const geom::Vec2 prop{x.x + sdt * rng.normal(k, 0), x.y + sdt * rng.normal(k, 1)};
        x = domain.reflect_planar(x, prop);
        z_raw += sdt * rng.normal(k, 2);
        visit(k + 1, geom::Point::spatial(x.x, x.y, fold_1d(z_raw, z0, z1)));
    }
}

PathSample simulate_rbm(geom::DomainPtr domain, const geom::Point& x0, double T, double dt,
                        std::uint64_t seed) {
    const int dim = domain->ambient_dim();
    std::vector<double> flat;
    flat.reserve((grid_steps(T, dt) + 1) * dim);
    walk_rbm(*domain, x0, T, dt, seed, [&](std::size_t, const geom::Point& p) {
        flat.push_back(p.x);
        flat.push_back(p.y);
        if (dim == 3) flat.push_back(p.z);
    });
    return PathSample(std::move(domain), T, dt, seed, std::move(flat));
}

TimeSet boundary_hit_times(const PathSample& path, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("boundary_hit_times: eps must be positive");
    TimeSet ts(path.T(), path.dt());
    const auto& domain = *path.domain();
    const std::size_t n = std::min(ts.n_cells(), path.size());
    for (std::size_t k = 0; k < n; ++k)
        if (domain.within_boundary(path.point(k), eps)) ts.mark(k);
    return ts;
}

std::vector<geom::Point> trace_points(const PathSample& path, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("trace_points: eps must be positive");
    const auto& domain = *path.domain();
    std::vector<geom::Point> out;
    for (std::size_t k = 0; k < path.size(); ++k) {
        const auto p = path.point(k);
        if (domain.within_boundary(p, eps)) out.push_back(domain.nearest_boundary_point(p));
    }
    return out;
}

HolderEstimate holder_exponent(const PathSample& path) {
    const std::size_t steps = path.steps();
    if (steps < (1u << 10)) throw std::invalid_argument("holder_exponent: path too short");
    const int dim = path.dim();
    const auto flat = path.flat();

    int max_j = 0;
    while ((std::size_t{1} << (max_j + 1)) <= steps) ++max_j;

    std::vector<double> log_h, log_m;
    for (int j = 0; j <= max_j; ++j) {
        const std::size_t span = std::size_t{1} << j;
        double m2 = 0.0;
        for (std::size_t k = 0; k + span <= steps; ++k) {
            const double* a = flat.data() + k * dim;
            const double* b = flat.data() + (k + span) * dim;
            double d2 = 0.0;
            for (int c = 0; c < dim; ++c) d2 += (b[c] - a[c]) * (b[c] - a[c]);
            m2 = std::max(m2, d2);
        }
        if (m2 <= 0.0) return {0.0, true};
        log_h.push_back(std::log(static_cast<double>(span) * path.dt()));
        log_m.push_back(0.5 * std::log(m2));
    }

    // Middle half of available spans.
    const std::size_t n = log_h.size();
    const std::size_t lo = n / 4;
    const std::size_t hi = std::max(lo + 2, (3 * n) / 4);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = lo; i <= std::min(hi, n - 1); ++i, ++m) {
        sx += log_h[i];
        sy += log_m[i];
        sxx += log_h[i] * log_h[i];
        sxy += log_h[i] * log_m[i];
    }
    const double denom = m * sxx - sx * sx;
    if (denom == 0.0) return {0.0, true};
    return {(m * sxy - sx * sy) / denom, false};
}

std::pair<std::vector<double>, std::vector<std::size_t>>
cube_hit_counts(const PathSample& path, int k_min, int k_max) {
    if (k_min > k_max) throw std::invalid_argument("cube_hit_counts: bad scale range");
    const int dim = path.dim();
    const auto flat = path.flat();
    std::vector<double> sides;
    std::vector<std::size_t> counts;
    for (int k = k_min; k <= k_max; ++k) {
        const double a = std::ldexp(1.0, -k);
        std::unordered_set<std::uint64_t> cubes;
        cubes.reserve(path.size() / 4);
        for (std::size_t i = 0; i < path.size(); ++i) {
            const double* p = flat.data() + i * dim;
            // Origin-anchored a*Z^n grid; coordinates stay small, so
            // 21-bit packed offsets are plenty.
            const auto qx = static_cast<std::int64_t>(std::floor(p[0] / a)) + (1 << 20);
            const auto qy = static_cast<std::int64_t>(std::floor(p[1] / a)) + (1 << 20);
            std::uint64_t key = (static_cast<std::uint64_t>(qx) & 0x1fffff) |
                                ((static_cast<std::uint64_t>(qy) & 0x1fffff) << 21);
            if (dim == 3) {
                const auto qz = static_cast<std::int64_t>(std::floor(p[2] / a)) + (1 << 20);
                key |= (static_cast<std::uint64_t>(qz) & 0x1fffff) << 42;
            }
            cubes.insert(key);
        }
        sides.push_back(a);
        counts.push_back(cubes.size());
    }
    return {std::move(sides), std::move(counts)};
}

}  // namespace rbmtrace::sim
