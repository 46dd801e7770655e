#include "rbmtrace/subord/subordinator.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <stdexcept>

#include "rbmtrace/sim/rng.hpp"

namespace rbmtrace::subord {

void SubordinatorPath::to_csv(std::ostream& os) const {
    os << "t,xi\n" << std::setprecision(17);
    for (std::size_t k = 0; k < values.size(); ++k)
        os << static_cast<double>(k) * dt << ',' << values[k] << '\n';
}

double sample_positive_stable(double s, std::uint64_t seed, std::uint64_t k) {
    // Kanter's identity: with U uniform on (0, pi) and E exponential,
    //   S = sin(sU) / sin(U)^{1/s} * (sin((1-s)U) / E)^{(1-s)/s}
    // has E[exp(-lambda S)] = exp(-lambda^s).
    const double u = std::numbers::pi * sim::u01_open(sim::counter_hash(seed, k, 0));
    const double e = -std::log(sim::u01_open_closed(sim::counter_hash(seed, k, 1)));
    const double ratio = (1.0 - s) / s;
    return std::sin(s * u) / std::pow(std::sin(u), 1.0 / s) *
           std::pow(std::sin((1.0 - s) * u) / e, ratio);
}

SubordinatorPath sample_subordinator(double s, double T, double dt, std::uint64_t seed) {
    if (!(s > 0.0) || !(s < 1.0))
        throw std::invalid_argument("sample_subordinator: s must be in (0, 1)");
    if (!(dt > 0.0) || !(T > 0.0))
        throw std::invalid_argument("sample_subordinator: need T, dt > 0");
    const std::size_t steps = sim::grid_steps(T, dt);
    const double scale = std::pow(dt, 1.0 / s);  // matches exp(-dt * lambda^s)

    SubordinatorPath xi;
    xi.s = s;
    xi.dt = dt;
    xi.seed = seed;
    xi.values.resize(steps + 1);
    xi.values[0] = 0.0;
    for (std::size_t k = 0; k < steps; ++k)
        xi.values[k + 1] = xi.values[k] + scale * sample_positive_stable(s, seed, k);
    return xi;
}

std::size_t grid_index_at(double value, double dt, std::size_t max_index) {
    const double q = value / dt;
    // Relative snap so exact multiples of dt never round down a cell.
    const auto idx = static_cast<std::size_t>(std::floor(q * (1.0 + 1e-12) + 1e-12));
    return std::min(idx, max_index);
}

sim::PathSample subordinate_path(const sim::PathSample& x, const SubordinatorPath& xi) {
    if (xi.values.empty()) throw std::invalid_argument("subordinate_path: empty subordinator");
    if (xi.max() > x.T())
        throw std::invalid_argument(
            "subordinate_path: subordinator exceeds the simulated horizon of x");
    const int dim = x.dim();
    const auto flat = x.flat();
    std::vector<double> out;
    out.reserve(xi.values.size() * dim);
    for (const double v : xi.values) {
        const std::size_t k = grid_index_at(v, x.dt(), x.steps());
        for (int c = 0; c < dim; ++c) out.push_back(flat[k * dim + c]);
    }
    const double T_z = static_cast<double>(xi.values.size() - 1) * xi.dt;
    return sim::PathSample(x.domain(), T_z, xi.dt, x.seed(), std::move(out));
}

sim::TimeSet preimage_timeset(const SubordinatorPath& xi, const sim::TimeSet& e) {
    if (xi.max() > e.T())
        throw std::invalid_argument("preimage_timeset: grid mismatch (e does not cover xi)");
    sim::TimeSet c(xi.T() > 0.0 ? xi.T() : xi.dt, xi.dt);
    const std::size_t n = std::min(c.n_cells(), xi.values.size());
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t cell = grid_index_at(xi.values[t], e.dt(), e.n_cells() - 1);
        if (e.marked(cell)) c.mark(t);
    }
    return c;
}

}  // namespace rbmtrace::subord
