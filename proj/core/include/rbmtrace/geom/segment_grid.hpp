#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rbmtrace/geom/vec2.hpp"

namespace rbmtrace::geom {

struct Segment {
    Vec2 a;
    Vec2 b;
};

/// Result of a segment/boundary crossing query.
struct CrossingHit {
    double t = 0.0;      // parameter along the query segment, in [0,1]
    int edge = -1;       // index of the boundary segment hit
    Vec2 point;          // crossing point
};

/// Uniform grid over a planar segment soup. Buckets edges per cell
/// (CSR layout), classifies cells as inside/outside/mixed, and stores
/// the Chebyshev cell distance to the nearest mixed cell so distance
/// queries can start near the answer.
///
/// Cell size defaults to twice the median edge length, clamped so the
/// grid stays between 8x8 and 2048x2048 cells.
class SegmentGrid {
public:
    enum class CellStatus : std::uint8_t { Outside = 0, Inside = 1, Mixed = 2 };

    SegmentGrid() = default;

    /// classify(p) decides inside/outside for points guaranteed to be
    /// away from the boundary; it is called once per connected
    /// component of edge-free cells.
    void build(std::vector<Segment> segments, const Box2& bbox,
               const std::function<bool(const Vec2&)>& classify);

    const std::vector<Segment>& segments() const { return segments_; }
    const Box2& bbox() const { return bbox_; }
    double cell_size() const { return h_; }

    CellStatus status_at(const Vec2& p) const;

    /// Exact Euclidean distance to the nearest segment.
    double distance(const Vec2& p) const;

    /// Closest point on the segment soup.
    Vec2 nearest_point(const Vec2& p) const;

    /// True iff distance(p) <= eps; cheaper than computing the distance
    /// when p is far from the boundary.
    bool within(const Vec2& p, double eps) const;

    /// First crossing of the open segment (p, q] with the soup,
    /// ignoring edge index `skip` (the edge just reflected off).
    std::optional<CrossingHit> first_crossing(const Vec2& p, const Vec2& q, int skip = -1) const;

    /// Parity-based inside test for points in mixed cells. Valid only
    /// when the soup is the full topological boundary of the region and
    /// every boundary crossing flips sidedness (simple closed rings).
    bool resolve_by_parity(const Vec2& p) const;

private:
    int cell_x(double x) const;
    int cell_y(double y) const;
    int clamp_cx(int i) const;
    int clamp_cy(int j) const;
    const int* bucket_begin(int ci, int cj) const;
    const int* bucket_end(int ci, int cj) const;
    void scan_cell(const Vec2& p, int ci, int cj, double& best2, int& best_edge) const;
    double brute_distance(const Vec2& p, int& best_edge) const;

    std::vector<Segment> segments_;
    Box2 bbox_{};
    Vec2 origin_;
    double h_ = 1.0;
    int nx_ = 0, ny_ = 0;
    std::vector<std::uint32_t> offsets_;   // CSR offsets, size nx*ny+1
    std::vector<int> bucket_edges_;        // CSR payload
    std::vector<CellStatus> status_;       // per cell
    std::vector<std::uint16_t> cell_dist_; // Chebyshev distance to nearest mixed cell
};

}  // namespace rbmtrace::geom
