#include "rbmtrace/sim/path.hpp"

#include <cmath>
#include <iomanip>
#include <stdexcept>

namespace rbmtrace::sim {

std::size_t grid_steps(double T, double dt) {
    if (!(dt > 0.0) || !(T > 0.0)) throw std::invalid_argument("grid_steps: need T, dt > 0");
    const double q = T / dt;
    const double r = std::round(q);
    if (std::abs(q - r) <= 1e-9 * std::max(1.0, q)) return static_cast<std::size_t>(r);
    return static_cast<std::size_t>(std::floor(q));
}

PathSample::PathSample(geom::DomainPtr domain, double T, double dt, std::uint64_t seed,
                       std::vector<double> flat_positions)
    : domain_(std::move(domain)), T_(T), dt_(dt), seed_(seed),
      dim_(domain_->ambient_dim()), positions_(std::move(flat_positions)) {
    if (positions_.empty() || positions_.size() % dim_ != 0)
        throw std::invalid_argument("PathSample: bad position buffer");
    if (positions_.size() / dim_ != grid_steps(T_, dt_) + 1)
        throw std::invalid_argument("PathSample: length inconsistent with floor(T/dt)+1");
}

geom::Point PathSample::point(std::size_t k) const {
    const double* p = positions_.data() + k * dim_;
    return dim_ == 2 ? geom::Point::planar(p[0], p[1])
                     : geom::Point::spatial(p[0], p[1], p[2]);
}

void PathSample::to_csv(std::ostream& os) const {
    os << (dim_ == 2 ? "step,x,y,dist_to_boundary" : "step,x,y,z,dist_to_boundary") << '\n';
    os << std::setprecision(17);
    for (std::size_t k = 0; k < size(); ++k) {
        const auto p = point(k);
        os << k << ',' << p.x << ',' << p.y;
        if (dim_ == 3) os << ',' << p.z;
        os << ',' << domain_->dist_to_boundary(p) << '\n';
    }
}

TimeSet::TimeSet(double T, double dt) : T_(T), dt_(dt) {
    flags_.assign(grid_steps(T, dt), false);
    if (flags_.empty()) throw std::invalid_argument("TimeSet: empty grid");
}

std::size_t TimeSet::count() const {
    std::size_t n = 0;
    for (bool b : flags_) n += b;
    return n;
}

void TimeSet::mark_all() { flags_.assign(flags_.size(), true); }

TimeSet TimeSet::coarsen(std::size_t factor) const {
    if (factor == 0) throw std::invalid_argument("coarsen: factor must be >= 1");
    TimeSet coarse(T_, dt_ * static_cast<double>(factor));
    for (std::size_t i = 0; i < flags_.size(); ++i)
        if (flags_[i]) {
            const std::size_t j = i / factor;
            if (j < coarse.flags_.size()) coarse.flags_[j] = true;
        }
    return coarse;
}

std::vector<std::pair<double, double>> TimeSet::to_intervals() const {
    std::vector<std::pair<double, double>> runs;
    std::size_t i = 0;
    while (i < flags_.size()) {
        if (!flags_[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < flags_.size() && flags_[j]) ++j;
        runs.emplace_back(static_cast<double>(i) * dt_, static_cast<double>(j) * dt_);
        i = j;
    }
    return runs;
}

void TimeSet::to_csv(std::ostream& os) const {
    os << "t_start,t_end\n" << std::setprecision(17);
    for (const auto& [a, b] : to_intervals()) os << a << ',' << b << '\n';
}

}  // namespace rbmtrace::sim
