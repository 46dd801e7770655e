#include "rbmtrace/fracdim/boxcount.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace rbmtrace::fracdim {

void DimensionEstimate::to_csv(std::ostream& os) const {
    os << "scale,count,used\n" << std::setprecision(17);
    for (std::size_t i = 0; i < scales.size(); ++i)
        os << scales[i] << ',' << counts[i] << ',' << (i >= window_lo && i <= window_hi)
           << '\n';
}

std::string DimensionEstimate::to_json_string(int indent) const {
    nlohmann::json j;
    j["slope"] = slope;
    j["stderr"] = stderr_;
    j["r2"] = r2;
    j["window"] = {window_lo, window_hi};
    j["scales"] = scales;
    j["counts"] = counts;
    j["proxy"] = "upper box-counting dimension";
    return j.dump(indent);
}

double CantorSpec::analytic_dim() const {
    return std::log(static_cast<double>(pieces)) / std::log(1.0 / ratio);
}

void CantorSpec::validate() const {
    if (pieces < 2) throw std::invalid_argument("CantorSpec: pieces must be >= 2");
    if (!(ratio > 0.0) || !(ratio < 1.0 / pieces))
        throw std::invalid_argument("CantorSpec: ratio must be in (0, 1/pieces)");
    if (depth < 0) throw std::invalid_argument("CantorSpec: negative depth");
    if (!(horizon > 0.0)) throw std::invalid_argument("CantorSpec: horizon must be positive");
}

std::pair<std::vector<double>, std::vector<std::size_t>>
box_counts_time(const sim::TimeSet& ts, int k_min, int k_max) {
    if (k_min >= k_max) throw std::invalid_argument("box_counts_time: need k_min < k_max");
    if (k_min < 0) throw std::invalid_argument("box_counts_time: negative k_min");
    const double T = ts.T();
    if (std::ldexp(T, -k_max) < 4.0 * ts.dt())
        throw std::invalid_argument("box_counts_time: resolution cutoff violated");

    std::vector<double> scales;
    std::vector<std::size_t> counts;
    for (int k = k_min; k <= k_max; ++k) {
        const double s = std::ldexp(T, -k);
        const std::size_t nboxes = std::size_t{1} << k;
        std::vector<bool> hit(nboxes, false);
        for (std::size_t i = 0; i < ts.n_cells(); ++i) {
            if (!ts.marked(i)) continue;
            const double t0 = static_cast<double>(i) * ts.dt();
            const double t1 = t0 + ts.dt();
            auto j0 = static_cast<std::size_t>(std::floor(t0 / s));
            auto j1 = static_cast<std::size_t>(std::floor((t1 - 1e-6 * ts.dt()) / s));
            j0 = std::min(j0, nboxes - 1);
            j1 = std::min(j1, nboxes - 1);
            for (std::size_t j = j0; j <= j1; ++j) hit[j] = true;
        }
        scales.push_back(s);
        counts.push_back(static_cast<std::size_t>(std::count(hit.begin(), hit.end(), true)));
    }
    return {std::move(scales), std::move(counts)};
}

std::pair<std::vector<double>, std::vector<std::size_t>>
box_counts_space(const std::vector<geom::Point>& points, int dim, int k_min, int k_max,
                 double min_box_side) {
    if (points.empty()) throw std::invalid_argument("box_counts_space: empty point set");
    if (k_min >= k_max) throw std::invalid_argument("box_counts_space: need k_min < k_max");
    if (k_min < 0) throw std::invalid_argument("box_counts_space: negative k_min");
    if (dim != 2 && dim != 3) throw std::invalid_argument("box_counts_space: dim must be 2 or 3");
    if (k_max > 20) throw std::invalid_argument("box_counts_space: k_max too fine");

    double lo[3] = {points[0].x, points[0].y, points[0].z};
    double hi[3] = {points[0].x, points[0].y, points[0].z};
    for (const auto& p : points)
        for (int c = 0; c < dim; ++c) {
            lo[c] = std::min(lo[c], p[c]);
            hi[c] = std::max(hi[c], p[c]);
        }
    double side = 0.0;
    for (int c = 0; c < dim; ++c) side = std::max(side, hi[c] - lo[c]);

    std::vector<double> scales;
    std::vector<std::size_t> counts;
    if (side <= 0.0) {  // all points identical
        for (int k = k_min; k <= k_max; ++k) {
            scales.push_back(0.0);
            counts.push_back(1);
        }
        return {std::move(scales), std::move(counts)};
    }
    if (min_box_side > 0.0 && std::ldexp(side, -k_max) < min_box_side)
        throw std::invalid_argument("box_counts_space: resolution cutoff violated");

    // Keys at the finest scale; coarser levels come from halving the
    // per-axis indices (dyadic boxes nest exactly).
    const double c_fine = std::ldexp(side, -k_max);
    const std::int64_t nmax = (std::int64_t{1} << k_max) - 1;
    std::vector<std::uint64_t> keys;
    keys.reserve(points.size());
    for (const auto& p : points) {
        std::uint64_t key = 0;
        for (int c = 0; c < dim; ++c) {
            auto q = static_cast<std::int64_t>(std::floor((p[c] - lo[c]) / c_fine));
            q = std::clamp<std::int64_t>(q, 0, nmax);
            key |= static_cast<std::uint64_t>(q) << (21 * c);
        }
        keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

    std::vector<std::size_t> rev_counts;
    std::vector<double> rev_scales;
    for (int k = k_max;; --k) {
        rev_scales.push_back(std::ldexp(side, -k));
        rev_counts.push_back(keys.size());
        if (k == k_min) break;
        constexpr std::uint64_t axis_mask = 0x1fffff;
        for (auto& key : keys) {
            std::uint64_t coarse = 0;
            for (int c = 0; c < dim; ++c)
                coarse |= (((key >> (21 * c)) & axis_mask) >> 1) << (21 * c);
            key = coarse;
        }
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    }
    for (auto it = rev_scales.rbegin(); it != rev_scales.rend(); ++it) scales.push_back(*it);
    for (auto it = rev_counts.rbegin(); it != rev_counts.rend(); ++it) counts.push_back(*it);
    return {std::move(scales), std::move(counts)};
}

namespace {

struct Fit {
    double slope, stderr_, r2;
};

Fit ols(const std::vector<double>& x, const std::vector<double>& y, std::size_t lo,
        std::size_t hi) {
    const auto n = static_cast<double>(hi - lo + 1);
    double sx = 0, sy = 0;
    for (std::size_t i = lo; i <= hi; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = lo; i <= hi; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    Fit f{0.0, 0.0, 1.0};
    if (sxx <= 0.0) return f;
    f.slope = sxy / sxx;
    double sse = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) {
        const double e = y[i] - my - f.slope * (x[i] - mx);
        sse += e * e;
    }
    if (syy > 0.0) f.r2 = std::clamp(1.0 - sse / syy, 0.0, 1.0);
    if (n > 2) f.stderr_ = std::sqrt(std::max(0.0, sse / (n - 2.0)) / sxx);
    return f;
}

}  // namespace

DimensionEstimate fit_loglog(const std::vector<double>& scales,
                             const std::vector<std::size_t>& counts, bool auto_window,
                             const std::vector<std::size_t>& capacities) {
    if (scales.size() != counts.size())
        throw std::invalid_argument("fit_loglog: size mismatch");
    if (scales.size() < 4) throw std::invalid_argument("fit_loglog: need >= 4 scales");
    for (std::size_t i = 1; i < scales.size(); ++i)
        if (!(scales[i] < scales[i - 1]))
            throw std::invalid_argument("fit_loglog: scales must strictly decrease");
    for (std::size_t c : counts)
        if (c == 0) throw std::invalid_argument("fit_loglog: zero count");

    const std::size_t n = scales.size();
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::log(1.0 / scales[i]);
        y[i] = std::log(static_cast<double>(counts[i]));
    }

    DimensionEstimate est;
    est.scales = scales;
    est.counts = counts;

    if (!auto_window) {
        const Fit f = ols(x, y, 0, n - 1);
        est.slope = f.slope;
        est.stderr_ = f.stderr_;
        est.r2 = f.r2;
        est.window_lo = 0;
        est.window_hi = n - 1;
        return est;
    }

    // Usable scales: informative counts, away from grid-resolution
    // pollution (two finest) and, when the universe size is known, away
    // from saturation. A profile that stays saturated at every scale is
    // a genuinely full-dimensional set, so the saturation filter only
    // applies when enough unsaturated scales remain to fit.
    std::vector<bool> usable(n, true);
    for (std::size_t i = 0; i < n; ++i) {
        if (counts[i] < 8) usable[i] = false;
        if (i + 2 >= n) usable[i] = false;
    }
    if (!capacities.empty()) {
        std::vector<bool> strict = usable;
        std::size_t left = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i < capacities.size() && 2 * counts[i] > capacities[i]) strict[i] = false;
            if (strict[i]) ++left;
        }
        if (left >= 4) usable = std::move(strict);
    }

    struct Window {
        std::size_t lo, hi;
        double r2;
        double stderr_;
    };
    std::vector<Window> windows;
    std::size_t i = 0;
    while (i < n) {
        if (!usable[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && usable[j]) ++j;  // run [i, j)
        for (std::size_t lo = i; lo + 3 < j; ++lo)
            for (std::size_t hi = lo + 3; hi < j; ++hi) {
                const Fit f = ols(x, y, lo, hi);
                windows.push_back({lo, hi, f.r2, f.stderr_});
            }
        i = j;
    }
    if (windows.empty())
        throw std::invalid_argument("fit_loglog: fewer than 4 usable scales after windowing");

    // Maximize r^2, but r^2 gaps comparable to the best window's own
    // residual level are sampling noise: such windows tie, and among
    // ties the most precise fit (smallest slope standard error) wins.
    double best_r2 = 0.0;
    for (const auto& w : windows) best_r2 = std::max(best_r2, w.r2);
    const double tie_floor = 1.0 - 2.0 * (1.0 - best_r2) - 1e-12;
    std::size_t best_lo = 0, best_hi = 0;
    bool found = false;
    double best_se = 0.0;
    for (const auto& w : windows) {
        if (w.r2 < tie_floor) continue;
        const std::size_t len = w.hi - w.lo + 1;
        const std::size_t cur_len = best_hi - best_lo + 1;
        if (!found || w.stderr_ < best_se - 1e-15 ||
            (std::abs(w.stderr_ - best_se) <= 1e-15 &&
             (len > cur_len || (len == cur_len && w.lo < best_lo)))) {
            best_lo = w.lo;
            best_hi = w.hi;
            best_se = w.stderr_;
            found = true;
        }
    }

    const Fit f = ols(x, y, best_lo, best_hi);
    est.slope = f.slope;
    est.stderr_ = f.stderr_;
    est.r2 = f.r2;
    est.window_lo = best_lo;
    est.window_hi = best_hi;
    return est;
}

sim::TimeSet cantor_timeset(const CantorSpec& spec, double grid_dt) {
    spec.validate();
    if (std::pow(spec.ratio, spec.depth) * spec.horizon < grid_dt)
        throw std::invalid_argument("cantor_timeset: depth exceeds grid resolution");

    sim::TimeSet ts(spec.horizon, grid_dt);
    // Generator intervals: m copies scaled by r, first anchored at the
    // left end and last at the right end.
    std::vector<std::pair<double, double>> intervals{{0.0, spec.horizon}};
    const double step_frac = spec.pieces > 1
                                 ? (1.0 - spec.ratio) / static_cast<double>(spec.pieces - 1)
                                 : 0.0;
    for (int d = 0; d < spec.depth; ++d) {
        std::vector<std::pair<double, double>> next;
        next.reserve(intervals.size() * spec.pieces);
        for (const auto& [a, b] : intervals) {
            const double len = b - a;
            for (int p = 0; p < spec.pieces; ++p) {
                const double off = a + static_cast<double>(p) * step_frac * len;
                next.emplace_back(off, off + spec.ratio * len);
            }
        }
        intervals = std::move(next);
    }
    for (const auto& [a, b] : intervals) {
        auto i0 = static_cast<std::size_t>(std::floor(a / grid_dt));
        auto i1 = static_cast<std::size_t>(std::floor((b - 1e-9 * grid_dt) / grid_dt));
        i0 = std::min(i0, ts.n_cells() - 1);
        i1 = std::min(i1, ts.n_cells() - 1);
        for (std::size_t i = i0; i <= i1; ++i) ts.mark(i);
    }
    return ts;
}

DimensionEstimate image_dimension(const sim::PathSample& path, const sim::TimeSet& e,
                                  int k_min, int k_max) {
    if (std::abs(e.dt() - path.dt()) > 1e-12 * path.dt())
        throw std::invalid_argument("image_dimension: time set is not on the path grid");
    std::vector<geom::Point> pts;
    const std::size_t n = std::min(e.n_cells(), path.size());
    for (std::size_t k = 0; k < n; ++k)
        if (e.marked(k)) pts.push_back(path.point(k));
    if (pts.empty()) throw std::invalid_argument("image_dimension: empty image");
    const auto [scales, counts] = box_counts_space(pts, path.dim(), k_min, k_max);
    if (pts.size() == 1 || scales.front() <= 0.0) {
        DimensionEstimate est;
        est.scales = scales;
        est.counts = counts;
        est.slope = 0.0;
        est.r2 = 1.0;
        est.window_lo = 0;
        est.window_hi = scales.size() - 1;
        return est;
    }
    return fit_loglog(scales, counts, true, box_capacities(path.dim(), k_min, k_max));
}

std::vector<std::size_t> box_capacities(int dim, int k_min, int k_max) {
    std::vector<std::size_t> caps;
    for (int k = k_min; k <= k_max; ++k) {
        const int bits = dim * k;
        caps.push_back(bits >= 63 ? std::numeric_limits<std::size_t>::max()
                                  : (std::size_t{1} << bits));
    }
    return caps;
}

}  // namespace rbmtrace::fracdim
