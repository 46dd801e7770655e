#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbmtrace/geom/point.hpp"
#include "rbmtrace/geom/segment_grid.hpp"
#include "rbmtrace/geom/vec2.hpp"

namespace rbmtrace::geom {

/// Thrown by boundary-distance queries when the point is outside the
/// domain closure.
class OutsideDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class DomainKind { polygon, snowflake, product, corridor };

std::string to_string(DomainKind kind);

/// Points within this (unsigned) distance of the boundary count as
/// members of the closure.
inline constexpr double kClosureTol = 1e-12;

namespace detail {
/// Fold the real line into [a0, a1] (period-2(a1-a0) tent map).
inline double fold_interval(double b, double a0, double a1) {
    const double len = a1 - a0;
    double y = std::fmod(b - a0, 2.0 * len);
    if (y < 0.0) y += 2.0 * len;
    return a0 + (y <= len ? y : 2.0 * len - y);
}
struct CorridorData;
}  // namespace detail

class Domain;
using DomainPtr = std::shared_ptr<const Domain>;

/// A bounded domain the simulator can walk in: planar polygons
/// (including Koch prefractals and corridor constructions) and
/// planar-times-interval products. Immutable after construction; all
/// queries are pure and safe to call concurrently.
class Domain {
public:
    ~Domain();
    Domain(Domain&&) noexcept;
    Domain(const Domain&) = delete;
    Domain& operator=(const Domain&) = delete;

    DomainKind kind() const { return kind_; }
    int ambient_dim() const { return dim_; }
    const std::vector<Vec2>& vertices() const { return ring_; }
    std::optional<double> analytic_boundary_dim() const { return boundary_dim_; }
    const std::string& id() const { return id_; }

    const Box2& planar_bbox() const;
    std::pair<double, double> interval() const;  // product kind only
    const DomainPtr& planar_factor() const;      // product kind only

    /// True iff p lies in the open domain.
    bool contains(const Point& p) const;

    /// True iff p lies in the closure (tolerance kClosureTol).
    bool in_closure(const Point& p) const;

    /// Exact Euclidean distance from a closure point to the boundary.
    /// Throws OutsideDomainError for points outside the closure.
    double dist_to_boundary(const Point& p) const;

    /// Distance test without the closure precondition; used for
    /// boundary-proximity sweeps.
    bool within_boundary(const Point& p, double eps) const;

    /// Nearest boundary point (unconditional).
    Point nearest_boundary_point(const Point& p) const;

    /// One reflected step: returns x_prop when it stays inside,
    /// otherwise reflects specularly across crossed boundary edges (up
    /// to 16 times) and falls back to nearest-point projection at
    /// corner pathologies. The result is always in the closure.
    Point reflect_step(const Point& x_cur, const Point& x_prop) const;

    /// An interior point suitable as a default start position.
    Point anchor() const;

    /// Planar fast paths used by the simulator (dim-2 geometry; for
    /// product domains these act on the planar factor).
    bool planar_contains(const Vec2& p) const;
    Vec2 reflect_planar(const Vec2& cur, const Vec2& prop) const;
    const SegmentGrid& boundary_grid() const;

    std::string to_json_string(int indent = -1) const;

private:
    Domain() = default;

    friend DomainPtr make_polygon(std::vector<Vec2> vertices);
    friend DomainPtr make_square(double side);
    friend DomainPtr make_koch_snowflake(int level);
    friend DomainPtr make_product(DomainPtr planar, double height);
    friend DomainPtr make_corridor_domain(int generations, double width_exponent);
    friend DomainPtr domain_from_json_string(const std::string& text);

    void build_planar_index();

    DomainKind kind_ = DomainKind::polygon;
    int dim_ = 2;
    std::vector<Vec2> ring_;  // closed CCW ring for polygon/snowflake
    std::optional<double> boundary_dim_;
    Box2 bbox_{};
    std::string id_;
    SegmentGrid grid_;

    // product kind
    DomainPtr factor_;
    double z0_ = 0.0, z1_ = 0.0;

    // corridor kind
    std::unique_ptr<detail::CorridorData> corridor_;

    // parameters retained for serialization
    double param_side_ = 0.0;
    int param_level_ = -1;
    int param_generations_ = 0;
    double param_width_exponent_ = 0.0;
    double param_height_ = 0.0;
};

/// Axis-aligned square [0,side]^2. Boundary dimension 1.
DomainPtr make_square(double side);

/// Simple CCW polygon from an explicit vertex list.
DomainPtr make_polygon(std::vector<Vec2> vertices);

/// Koch-snowflake prefractal: middle-third outward-bump substitution
/// applied `level` times to an equilateral triangle centered at the
/// origin with circumradius 1. 3*4^level edges; attached boundary
/// dimension log4/log3.
DomainPtr make_koch_snowflake(int level);

/// 3-D product domain planar x (0, height).
DomainPtr make_product(DomainPtr planar, double height);

/// Planar domain made of dyadic-square rooms around a positive-area
/// totally disconnected set (product of two fat Cantor sets of measure
/// 1/2 each), rooms joined through edge slits of width
/// exp(-g^width_exponent) for generation-g rooms. Connectivity of the
/// resulting tiling is verified by flood fill; disconnected parameter
/// combinations are rejected.
DomainPtr make_corridor_domain(int generations, double width_exponent);

DomainPtr domain_from_json_string(const std::string& text);

/// Per-axis fat-Cantor (Smith-Volterra-Cantor) kept intervals after
/// `generations` removal rounds; step k removes a centered open
/// interval of length 4^-k from each kept interval. Exposed for the
/// corridor construction and its tests.
std::vector<std::pair<double, double>> fat_cantor_intervals(int generations);

/// Slit width exp(-g^w) for corridor generation g.
double corridor_slit_width(int generation, double width_exponent);

}  // namespace rbmtrace::geom
