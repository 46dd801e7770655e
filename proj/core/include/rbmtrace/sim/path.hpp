#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "rbmtrace/geom/domain.hpp"
#include "rbmtrace/geom/point.hpp"

namespace rbmtrace::sim {

/// Number of grid steps covering [0, T] at resolution dt. Snaps to the
/// nearest integer when T/dt is integral up to rounding noise.
std::size_t grid_steps(double T, double dt);

/// A discretized trajectory on a uniform time grid. Positions are kept
/// flat ((steps+1) * dim doubles) and always lie in the domain closure.
class PathSample {
public:
    PathSample(geom::DomainPtr domain, double T, double dt, std::uint64_t seed,
               std::vector<double> flat_positions);

    double dt() const { return dt_; }
    double T() const { return T_; }
    std::uint64_t seed() const { return seed_; }
    int dim() const { return dim_; }
    const geom::DomainPtr& domain() const { return domain_; }
    const std::string& domain_id() const { return domain_->id(); }

    std::size_t size() const { return positions_.size() / dim_; }  // number of points
    std::size_t steps() const { return size() - 1; }

    geom::Point point(std::size_t k) const;
    std::span<const double> flat() const { return positions_; }

    /// CSV export: step,x,y[,z],dist_to_boundary.
    void to_csv(std::ostream& os) const;

private:
    geom::DomainPtr domain_;
    double T_;
    double dt_;
    std::uint64_t seed_;
    int dim_;
    std::vector<double> positions_;
};

/// Subset of [0, T] stored as marked grid cells; cell i covers
/// [i*dt, (i+1)*dt).
class TimeSet {
public:
    TimeSet(double T, double dt);

    double dt() const { return dt_; }
    double T() const { return T_; }
    std::size_t n_cells() const { return flags_.size(); }

    void mark(std::size_t i) { flags_[i] = true; }
    bool marked(std::size_t i) const { return flags_[i]; }
    std::size_t count() const;
    bool empty() const { return count() == 0; }

    void mark_all();

    /// Coarsen by an integer factor; a coarse cell is marked iff any of
    /// its fine cells is marked (refinement monotonicity).
    TimeSet coarsen(std::size_t factor) const;

    /// Run-length encoding: maximal marked intervals [start, end).
    std::vector<std::pair<double, double>> to_intervals() const;

    /// CSV export of the RLE intervals: t_start,t_end.
    void to_csv(std::ostream& os) const;

private:
    double T_;
    double dt_;
    std::vector<bool> flags_;
};

}  // namespace rbmtrace::sim
