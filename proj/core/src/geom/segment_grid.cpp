#include "rbmtrace/geom/segment_grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace rbmtrace::geom {

namespace {

double median_edge_length(const std::vector<Segment>& segs) {
    if (segs.empty()) return 1.0;
    std::vector<double> lens;
    lens.reserve(segs.size());
    for (const auto& s : segs) lens.push_back(dist(s.a, s.b));
    auto mid = lens.begin() + static_cast<std::ptrdiff_t>(lens.size() / 2);
    std::nth_element(lens.begin(), mid, lens.end());
    return std::max(*mid, 1e-12);
}

}  // namespace

int SegmentGrid::cell_x(double x) const {
    return static_cast<int>(std::floor((x - origin_.x) / h_));
}
int SegmentGrid::cell_y(double y) const {
    return static_cast<int>(std::floor((y - origin_.y) / h_));
}
int SegmentGrid::clamp_cx(int i) const { return std::clamp(i, 0, nx_ - 1); }
int SegmentGrid::clamp_cy(int j) const { return std::clamp(j, 0, ny_ - 1); }

const int* SegmentGrid::bucket_begin(int ci, int cj) const {
    const std::size_t cell = static_cast<std::size_t>(cj) * nx_ + ci;
    return bucket_edges_.data() + offsets_[cell];
}
const int* SegmentGrid::bucket_end(int ci, int cj) const {
    const std::size_t cell = static_cast<std::size_t>(cj) * nx_ + ci;
    return bucket_edges_.data() + offsets_[cell + 1];
}

void SegmentGrid::build(std::vector<Segment> segments, const Box2& bbox,
                        const std::function<bool(const Vec2&)>& classify) {
    if (segments.empty()) throw std::invalid_argument("SegmentGrid: empty segment soup");
    segments_ = std::move(segments);
    bbox_ = bbox;

    const double extent = std::max(bbox_.max_extent(), 1e-9);
    double h = 2.0 * median_edge_length(segments_);
    h = std::min(h, extent / 8.0);      // at least 8 cells across
    h = std::max(h, extent / 2048.0);   // at most 2048 cells across
    h_ = h;

    // Half-cell pad so closure points never fall outside the grid.
    origin_ = bbox_.lo - Vec2{h_ * 0.5, h_ * 0.5};
    nx_ = static_cast<int>(std::ceil((bbox_.hi.x - origin_.x) / h_)) + 1;
    ny_ = static_cast<int>(std::ceil((bbox_.hi.y - origin_.y) / h_)) + 1;
    const std::size_t ncells = static_cast<std::size_t>(nx_) * ny_;

    // CSR bucket fill: count, prefix-sum, place. Edges are inserted in
    // every cell their AABB overlaps (conservative).
    std::vector<std::uint32_t> counts(ncells + 1, 0);
    auto cells_of = [&](const Segment& s, auto&& fn) {
        const int i0 = clamp_cx(cell_x(std::min(s.a.x, s.b.x)));
        const int i1 = clamp_cx(cell_x(std::max(s.a.x, s.b.x)));
        const int j0 = clamp_cy(cell_y(std::min(s.a.y, s.b.y)));
        const int j1 = clamp_cy(cell_y(std::max(s.a.y, s.b.y)));
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i) fn(static_cast<std::size_t>(j) * nx_ + i);
    };
    for (const auto& s : segments_) cells_of(s, [&](std::size_t c) { ++counts[c + 1]; });
    for (std::size_t c = 1; c <= ncells; ++c) counts[c] += counts[c - 1];
    offsets_ = counts;
    bucket_edges_.resize(offsets_[ncells]);
    std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (int e = 0; e < static_cast<int>(segments_.size()); ++e)
        cells_of(segments_[e], [&](std::size_t c) { bucket_edges_[cursor[c]++] = e; });

    // Cell status: mixed where any edge lives, otherwise flood-filled
    // components resolved by one classify() call each.
    status_.assign(ncells, CellStatus::Outside);
    for (std::size_t c = 0; c < ncells; ++c)
        if (offsets_[c + 1] > offsets_[c]) status_[c] = CellStatus::Mixed;

    std::vector<std::uint8_t> visited(ncells, 0);
    std::deque<std::size_t> queue;
    for (std::size_t c0 = 0; c0 < ncells; ++c0) {
        if (visited[c0] || status_[c0] == CellStatus::Mixed) continue;
        // Collect one component of edge-free cells.
        std::vector<std::size_t> component;
        visited[c0] = 1;
        queue.clear();
        queue.push_back(c0);
        while (!queue.empty()) {
            const std::size_t c = queue.front();
            queue.pop_front();
            component.push_back(c);
            const int ci = static_cast<int>(c % nx_);
            const int cj = static_cast<int>(c / nx_);
            const int di[4] = {1, -1, 0, 0};
            const int dj[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) {
                const int ni = ci + di[k], nj = cj + dj[k];
                if (ni < 0 || ni >= nx_ || nj < 0 || nj >= ny_) continue;
                const std::size_t nc = static_cast<std::size_t>(nj) * nx_ + ni;
                if (!visited[nc] && status_[nc] != CellStatus::Mixed) {
                    visited[nc] = 1;
                    queue.push_back(nc);
                }
            }
        }
        const int ci = static_cast<int>(c0 % nx_);
        const int cj = static_cast<int>(c0 / nx_);
        const Vec2 center{origin_.x + (ci + 0.5) * h_, origin_.y + (cj + 0.5) * h_};
        const CellStatus st = classify(center) ? CellStatus::Inside : CellStatus::Outside;
        for (std::size_t c : component) status_[c] = st;
    }

    // Chebyshev distance to the nearest mixed cell (8-neighbor BFS).
    cell_dist_.assign(ncells, std::numeric_limits<std::uint16_t>::max());
    queue.clear();
    for (std::size_t c = 0; c < ncells; ++c)
        if (status_[c] == CellStatus::Mixed) {
            cell_dist_[c] = 0;
            queue.push_back(c);
        }
    while (!queue.empty()) {
        const std::size_t c = queue.front();
        queue.pop_front();
        const int ci = static_cast<int>(c % nx_);
        const int cj = static_cast<int>(c / nx_);
        const std::uint16_t d = cell_dist_[c];
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
                if (di == 0 && dj == 0) continue;
                const int ni = ci + di, nj = cj + dj;
                if (ni < 0 || ni >= nx_ || nj < 0 || nj >= ny_) continue;
                const std::size_t nc = static_cast<std::size_t>(nj) * nx_ + ni;
                if (cell_dist_[nc] > d + 1) {
                    cell_dist_[nc] = d + 1;
                    queue.push_back(nc);
                }
            }
    }
}

SegmentGrid::CellStatus SegmentGrid::status_at(const Vec2& p) const {
    const int ci = cell_x(p.x), cj = cell_y(p.y);
    if (ci < 0 || ci >= nx_ || cj < 0 || cj >= ny_) return CellStatus::Outside;
    return status_[static_cast<std::size_t>(cj) * nx_ + ci];
}

void SegmentGrid::scan_cell(const Vec2& p, int ci, int cj, double& best2, int& best_edge) const {
    const int* it = bucket_begin(ci, cj);
    const int* end = bucket_end(ci, cj);
    for (; it != end; ++it) {
        const double d2 = segment_dist2(p, segments_[*it].a, segments_[*it].b);
        if (d2 < best2) {
            best2 = d2;
            best_edge = *it;
        }
    }
}

double SegmentGrid::brute_distance(const Vec2& p, int& best_edge) const {
    double best2 = std::numeric_limits<double>::infinity();
    for (int e = 0; e < static_cast<int>(segments_.size()); ++e) {
        const double d2 = segment_dist2(p, segments_[e].a, segments_[e].b);
        if (d2 < best2) {
            best2 = d2;
            best_edge = e;
        }
    }
    return std::sqrt(best2);
}

double SegmentGrid::distance(const Vec2& p) const {
    const int ci = clamp_cx(cell_x(p.x));
    const int cj = clamp_cy(cell_y(p.y));
    const std::uint32_t k = cell_dist_[static_cast<std::size_t>(cj) * nx_ + ci];

    // Deep-interior points: a full sweep beats walking thousands of
    // grid rings.
    if (k > 48) {
        int e = -1;
        return brute_distance(p, e);
    }

    double best2 = std::numeric_limits<double>::infinity();
    int best_edge = -1;
    const int max_ring = std::max(nx_, ny_);
    for (int r = (k > 0 ? static_cast<int>(k) - 1 : 0); r <= max_ring; ++r) {
        const int i0 = ci - r, i1 = ci + r, j0 = cj - r, j1 = cj + r;
        for (int i = std::max(i0, 0); i <= std::min(i1, nx_ - 1); ++i) {
            if (j0 >= 0) scan_cell(p, i, j0, best2, best_edge);
            if (r > 0 && j1 < ny_) scan_cell(p, i, j1, best2, best_edge);
        }
        for (int j = std::max(j0 + 1, 0); j <= std::min(j1 - 1, ny_ - 1); ++j) {
            if (i0 >= 0) scan_cell(p, i0, j, best2, best_edge);
            if (i1 < nx_) scan_cell(p, i1, j, best2, best_edge);
        }
        // Cells beyond ring r are at least r*h away.
        if (best2 <= static_cast<double>(r) * h_ * static_cast<double>(r) * h_) break;
    }
    return std::sqrt(best2);
}

Vec2 SegmentGrid::nearest_point(const Vec2& p) const {
    const int ci = clamp_cx(cell_x(p.x));
    const int cj = clamp_cy(cell_y(p.y));
    const std::uint32_t k = cell_dist_[static_cast<std::size_t>(cj) * nx_ + ci];

    int best_edge = -1;
    if (k > 48) {
        brute_distance(p, best_edge);
    } else {
        double best2 = std::numeric_limits<double>::infinity();
        const int max_ring = std::max(nx_, ny_);
        for (int r = (k > 0 ? static_cast<int>(k) - 1 : 0); r <= max_ring; ++r) {
            const int i0 = ci - r, i1 = ci + r, j0 = cj - r, j1 = cj + r;
            for (int i = std::max(i0, 0); i <= std::min(i1, nx_ - 1); ++i) {
                if (j0 >= 0) scan_cell(p, i, j0, best2, best_edge);
                if (r > 0 && j1 < ny_) scan_cell(p, i, j1, best2, best_edge);
            }
            for (int j = std::max(j0 + 1, 0); j <= std::min(j1 - 1, ny_ - 1); ++j) {
                if (i0 >= 0) scan_cell(p, i0, j, best2, best_edge);
                if (i1 < nx_) scan_cell(p, i1, j, best2, best_edge);
            }
            if (best2 <= static_cast<double>(r) * h_ * static_cast<double>(r) * h_) break;
        }
    }
    if (best_edge < 0) return p;
    return segment_closest(p, segments_[best_edge].a, segments_[best_edge].b);
}

bool SegmentGrid::within(const Vec2& p, double eps) const {
    const int ci = clamp_cx(cell_x(p.x));
    const int cj = clamp_cy(cell_y(p.y));
    const std::uint32_t k = cell_dist_[static_cast<std::size_t>(cj) * nx_ + ci];
    if (k > 1 && (static_cast<double>(k) - 1.0) * h_ > eps) return false;
    return distance(p) <= eps;
}

std::optional<CrossingHit> SegmentGrid::first_crossing(const Vec2& p, const Vec2& q,
                                                       int skip) const {
    // Candidate edges come from every cell the segment AABB overlaps;
    // step segments are short, so this region is a handful of cells.
    const int i0 = clamp_cx(cell_x(std::min(p.x, q.x)));
    const int i1 = clamp_cx(cell_x(std::max(p.x, q.x)));
    const int j0 = clamp_cy(cell_y(std::min(p.y, q.y)));
    const int j1 = clamp_cy(cell_y(std::max(p.y, q.y)));

    const Vec2 d1 = q - p;
    CrossingHit best;
    best.t = std::numeric_limits<double>::infinity();

    int last_seen = -1;  // cheap duplicate guard; full dedupe below
    std::vector<int> seen;
    for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
            const int* it = bucket_begin(i, j);
            const int* end = bucket_end(i, j);
            for (; it != end; ++it) {
                const int e = *it;
                if (e == skip || e == last_seen) continue;
                if ((j1 > j0 || i1 > i0) &&
                    std::find(seen.begin(), seen.end(), e) != seen.end())
                    continue;
                last_seen = e;
                if (j1 > j0 || i1 > i0) seen.push_back(e);

                const Vec2& a = segments_[e].a;
                const Vec2& b = segments_[e].b;
                const Vec2 d2 = b - a;
                const double denom = d1.cross(d2);
                if (denom == 0.0) continue;  // parallel; grazing handled elsewhere
                const Vec2 ap = a - p;
                const double t = ap.cross(d2) / denom;
                const double u = ap.cross(d1) / denom;
                if (t < -1e-15 || t > 1.0 + 1e-12) continue;
                if (u < -1e-9 || u > 1.0 + 1e-9) continue;
                if (t < best.t) {
                    best.t = t;
                    best.edge = e;
                    best.point = p + t * d1;
                }
            }
        }
    }
    if (best.edge < 0) return std::nullopt;
    best.t = std::clamp(best.t, 0.0, 1.0);
    return best;
}

bool SegmentGrid::resolve_by_parity(const Vec2& p) const {
    int ci = cell_x(p.x);
    const int cj = cell_y(p.y);
    if (ci < 0 || ci >= nx_ || cj < 0 || cj >= ny_) return false;

    // Walk left out of the mixed region, collecting candidate edges.
    std::vector<int> candidates;
    int i = ci;
    while (i >= 0 && status_[static_cast<std::size_t>(cj) * nx_ + i] == CellStatus::Mixed) {
        const int* it = bucket_begin(i, cj);
        const int* end = bucket_end(i, cj);
        candidates.insert(candidates.end(), it, end);
        --i;
    }
    const bool base_inside =
        i >= 0 && status_[static_cast<std::size_t>(cj) * nx_ + i] == CellStatus::Inside;
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // Count crossings of the horizontal ray from the known cell to p
    // (half-open rule is robust at shared vertices).
    int crossings = 0;
    for (int e : candidates) {
        const Vec2& a = segments_[e].a;
        const Vec2& b = segments_[e].b;
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xc = a.x + (b.x - a.x) * (p.y - a.y) / (b.y - a.y);
            if (xc <= p.x) ++crossings;
        }
    }
    return base_inside != (crossings % 2 == 1);
}

}  // namespace rbmtrace::geom
