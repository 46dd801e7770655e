#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rbmtrace/geom/domain.hpp"
#include "rbmtrace/sim/path.hpp"

namespace rbmtrace::sim {

/// Exact reflection map folding the real line into [a0, a1]
/// (period-2(a1-a0) tent map). Simulates the interval factor of
/// product domains exactly from an unreflected Brownian coordinate.
double fold_1d(double b, double a0, double a1);

/// Reflected random walk surrogate for RBM:
///   x_{k+1} = reflect_step(domain, x_k, x_k + sqrt(dt) * g_k)
/// with g_k standard n-dim Gaussians keyed by (seed, k). Deterministic
/// given (seed, dt, T, x0, domain). For product domains the interval
/// coordinate is folded exactly from the running unreflected sum.
PathSample simulate_rbm(geom::DomainPtr domain, const geom::Point& x0, double T, double dt,
                        std::uint64_t seed);

/// Streaming variant: visit(k, p) is called for k = 0..steps with the
/// same positions simulate_rbm would store, without materializing them.
void walk_rbm(const geom::Domain& domain, const geom::Point& x0, double T, double dt,
              std::uint64_t seed, const std::function<void(std::size_t, const geom::Point&)>& visit);

/// Marks grid cell k iff dist_to_boundary(positions[k]) <= eps.
TimeSet boundary_hit_times(const PathSample& path, double eps);

/// Nearest-boundary projections of all positions within eps of the
/// boundary (the discrete boundary trace).
std::vector<geom::Point> trace_points(const PathSample& path, double eps);

struct HolderEstimate {
    double exponent = 0.0;
    bool degenerate = false;  // constant path: exponent reported as 0
};

/// Least-squares slope of log max-increment vs log span over dyadic
/// spans h = 2^j dt, fitted on the middle half of available j.
HolderEstimate holder_exponent(const PathSample& path);

/// Number of distinct cubes of side 2^-k (grid anchored at the origin)
/// hit by the path, for k in [k_min, k_max]. Calibration diagnostic:
/// the fitted slope of log count vs log(1/side) stays near 2.
std::pair<std::vector<double>, std::vector<std::size_t>>
cube_hit_counts(const PathSample& path, int k_min, int k_max);

}  // namespace rbmtrace::sim
