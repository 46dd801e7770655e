#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "rbmtrace/geom/point.hpp"
#include "rbmtrace/sim/path.hpp"

namespace rbmtrace::fracdim {

/// Box-counting data and its fitted log-log slope. Box dimension is the
/// computable proxy this toolkit reports for Hausdorff dimension; every
/// report carries that proxy status.
struct DimensionEstimate {
    std::vector<double> scales;      // box sides, decreasing
    std::vector<std::size_t> counts; // occupied boxes per scale
    double slope = 0.0;
    double stderr_ = 0.0;
    double r2 = 0.0;
    std::size_t window_lo = 0;  // inclusive indices into scales/counts
    std::size_t window_hi = 0;

    /// CSV export: scale,count,used.
    void to_csv(std::ostream& os) const;
    /// JSON summary: slope, stderr, r2, window, scales, counts.
    std::string to_json_string(int indent = -1) const;
};

/// Deterministic self-similar time-set fixture: m pieces of ratio r.
struct CantorSpec {
    int pieces = 2;        // m >= 2
    double ratio = 1.0 / 3.0;  // r in (0, 1/m)
    int depth = 8;
    double horizon = 1.0;  // T

    double analytic_dim() const;
    void validate() const;
};

/// Dyadic-interval counts over [0, T]: counts[k] = number of intervals
/// of length T*2^-k meeting the set, for k in [k_min, k_max].
/// Requires 2^-k_max * T >= 4 * ts.dt (resolution cutoff).
std::pair<std::vector<double>, std::vector<std::size_t>>
box_counts_time(const sim::TimeSet& ts, int k_min, int k_max);

/// Dyadic-cube counts anchored at the point set's bounding box, side
/// (largest bbox extent) * 2^-k. min_box_side > 0 enforces a spatial
/// resolution cutoff on the finest scale.
std::pair<std::vector<double>, std::vector<std::size_t>>
box_counts_space(const std::vector<geom::Point>& points, int dim, int k_min, int k_max,
                 double min_box_side = 0.0);

/// Ordinary least squares of log count vs log(1/scale). With
/// auto_window: drops scales with count < 8, the two finest scales, and
/// (when capacities are supplied) scales more than half saturated; then
/// maximizes r^2 over contiguous windows of length >= 4.
DimensionEstimate fit_loglog(const std::vector<double>& scales,
                             const std::vector<std::size_t>& counts, bool auto_window,
                             const std::vector<std::size_t>& capacities = {});

/// Depth-level approximation of the CantorSpec set on [0, T], marked on
/// a grid of resolution grid_dt. Requires r^depth * T >= grid_dt.
sim::TimeSet cantor_timeset(const CantorSpec& spec, double grid_dt);

/// Box-universe sizes (2^k per axis) for saturation-aware fits.
std::vector<std::size_t> box_capacities(int dim, int k_min, int k_max);

/// Box dimension of the image {positions[k] : cell k marked in e}.
DimensionEstimate image_dimension(const sim::PathSample& path, const sim::TimeSet& e,
                                  int k_min, int k_max);

}  // namespace rbmtrace::fracdim
