#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "rbmtrace/sim/path.hpp"

namespace rbmtrace::subord {

/// Nondecreasing path of a one-sided stable process of index s in
/// (0,1), on a uniform grid; values[0] == 0 and the increment over each
/// dt has Laplace transform exp(-dt * lambda^s).
struct SubordinatorPath {
    double s = 0.0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> values;

    double T() const { return static_cast<double>(values.size() - 1) * dt; }
    double max() const { return values.back(); }

    /// CSV export: t,xi.
    void to_csv(std::ostream& os) const;
};

/// One draw of the standard positive stable(s) law,
/// E[exp(-lambda S)] = exp(-lambda^s), via the trigonometric
/// uniform-plus-exponential identity; keyed by (seed, k).
double sample_positive_stable(double s, std::uint64_t seed, std::uint64_t k);

/// Samples the subordinator on the grid {0, dt, ..., ~T}; increments
/// are i.i.d. dt^{1/s}-scaled positive stable(s) draws.
SubordinatorPath sample_subordinator(double s, double T, double dt, std::uint64_t seed);

/// Grid index of the path position at time value (nearest index <=
/// value, with a relative snap for exact grid multiples).
std::size_t grid_index_at(double value, double dt, std::size_t max_index);

/// Z_t = X_{xi_t}: positions of x at the nearest grid index <= xi.
/// Throws when the subordinator exceeds the simulated horizon of x.
sim::PathSample subordinate_path(const sim::PathSample& x, const SubordinatorPath& xi);

/// Pre-image time set C_E = {t : xi_t in E}; marks cell t iff xi at
/// that cell lands in a marked cell of e.
sim::TimeSet preimage_timeset(const SubordinatorPath& xi, const sim::TimeSet& e);

}  // namespace rbmtrace::subord
