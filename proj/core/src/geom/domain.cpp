#include "rbmtrace/geom/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "corridor_data.hpp"

namespace rbmtrace::geom {

namespace {

constexpr double kLog4Log3 = 1.2618595071429148;  // log(4)/log(3)

/// Crossing-parity point-in-ring test (half-open rule at vertices).
bool point_in_ring(const std::vector<Vec2>& ring, const Vec2& p) {
    bool inside = false;
    const std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = ring[i];
        const Vec2& b = ring[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xc = a.x + (b.x - a.x) * (p.y - a.y) / (b.y - a.y);
            if (p.x < xc) inside = !inside;
        }
    }
    return inside;
}

double ring_signed_area(const std::vector<Vec2>& ring) {
    double a = 0.0;
    const std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
        a += ring[j].cross(ring[i]);
    return 0.5 * a;
}

bool proper_intersection(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        return (q - p).cross(r - p);
    };
    const double o1 = orient(a, b, c), o2 = orient(a, b, d);
    const double o3 = orient(c, d, a), o4 = orient(c, d, b);
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 &&
           o3 != 0 && o4 != 0;
}

std::vector<Segment> ring_segments(const std::vector<Vec2>& ring) {
    std::vector<Segment> segs;
    segs.reserve(ring.size());
    for (std::size_t i = 0; i < ring.size(); ++i)
        segs.push_back({ring[i], ring[(i + 1) % ring.size()]});
    return segs;
}

Box2 ring_bbox(const std::vector<Vec2>& ring) {
    Box2 b{ring.front(), ring.front()};
    for (const auto& v : ring) b.expand(v);
    return b;
}

}  // namespace

std::string to_string(DomainKind kind) {
    switch (kind) {
        case DomainKind::polygon: return "polygon";
        case DomainKind::snowflake: return "snowflake";
        case DomainKind::product: return "product";
        case DomainKind::corridor: return "corridor";
    }
    return "?";
}

Domain::~Domain() = default;
Domain::Domain(Domain&&) noexcept = default;

void Domain::build_planar_index() {
    if (kind_ == DomainKind::corridor) {
        std::vector<Segment> soup;
        corridor_ = std::make_unique<detail::CorridorData>(
            detail::build_corridor(param_generations_, param_width_exponent_, soup));
        bbox_ = Box2{{0.0, 0.0}, {1.0, 1.0}};
        // Cell centers can land exactly on dyadic wall lines; classify
        // a deterministically nudged point instead.
        const detail::CorridorData* cd = corridor_.get();
        grid_.build(std::move(soup), bbox_, [cd](const Vec2& c) {
            const double nudge = 1.1283791670955126e-4;  // irrational-ish, sub-cell
            return cd->strictly_in_tile({c.x + nudge, c.y + nudge});
        });
        return;
    }
    bbox_ = ring_bbox(ring_);
    const std::vector<Vec2>* ring = &ring_;
    grid_.build(ring_segments(ring_), bbox_,
                [ring](const Vec2& c) { return point_in_ring(*ring, c); });
}

const Box2& Domain::planar_bbox() const {
    return kind_ == DomainKind::product ? factor_->planar_bbox() : bbox_;
}

std::pair<double, double> Domain::interval() const {
    if (kind_ != DomainKind::product)
        throw std::logic_error("interval(): not a product domain");
    return {z0_, z1_};
}

const DomainPtr& Domain::planar_factor() const {
    if (kind_ != DomainKind::product)
        throw std::logic_error("planar_factor(): not a product domain");
    return factor_;
}

const SegmentGrid& Domain::boundary_grid() const {
    return kind_ == DomainKind::product ? factor_->grid_ : grid_;
}

bool Domain::planar_contains(const Vec2& p) const {
    if (kind_ == DomainKind::product) return factor_->planar_contains(p);
    switch (grid_.status_at(p)) {
        case SegmentGrid::CellStatus::Inside: return true;
        case SegmentGrid::CellStatus::Outside: return false;
        case SegmentGrid::CellStatus::Mixed: break;
    }
    if (kind_ == DomainKind::corridor) {
        if (corridor_->strictly_in_tile(p)) return true;
        // On a tile gridline: inside only if strictly interior to a
        // slit opening, i.e. away from every boundary segment.
        if (p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0) {
            const auto& leaf = corridor_->nodes[corridor_->locate_leaf(p)];
            if (leaf.tile >= 0) return grid_.distance(p) > 1e-13;
        }
        return false;
    }
    return grid_.resolve_by_parity(p);
}

bool Domain::contains(const Point& p) const {
    if (!p.finite()) return false;
    if (kind_ == DomainKind::product)
        return p.dim == 3 && p.z > z0_ && p.z < z1_ && factor_->planar_contains(p.xy());
    return p.dim == 2 && planar_contains(p.xy());
}

bool Domain::in_closure(const Point& p) const {
    if (!p.finite()) return false;
    if (kind_ == DomainKind::product) {
        if (p.dim != 3) return false;
        if (p.z < z0_ - kClosureTol || p.z > z1_ + kClosureTol) return false;
        return factor_->in_closure(Point::from_xy(p.xy()));
    }
    if (p.dim != 2) return false;
    return planar_contains(p.xy()) || grid_.distance(p.xy()) <= kClosureTol;
}

double Domain::dist_to_boundary(const Point& p) const {
    if (!in_closure(p))
        throw OutsideDomainError("dist_to_boundary: point outside the domain closure");
    if (kind_ == DomainKind::product) {
        const double dpl = factor_->grid_.distance(p.xy());
        return std::max(0.0, std::min({dpl, p.z - z0_, z1_ - p.z}));
    }
    return grid_.distance(p.xy());
}

bool Domain::within_boundary(const Point& p, double eps) const {
    if (kind_ == DomainKind::product) {
        if (p.z - z0_ <= eps || z1_ - p.z <= eps) return true;
        return factor_->grid_.within(p.xy(), eps);
    }
    return grid_.within(p.xy(), eps);
}

Point Domain::nearest_boundary_point(const Point& p) const {
    if (kind_ == DomainKind::product) {
        const double dpl = factor_->grid_.distance(p.xy());
        const double dlo = p.z - z0_, dhi = z1_ - p.z;
        if (dpl <= dlo && dpl <= dhi) {
            const Vec2 q = factor_->grid_.nearest_point(p.xy());
            return Point::spatial(q.x, q.y, p.z);
        }
        return Point::spatial(p.x, p.y, dlo <= dhi ? z0_ : z1_);
    }
    const Vec2 q = grid_.nearest_point(p.xy());
    return Point::from_xy(q);
}

Vec2 Domain::reflect_planar(const Vec2& cur, const Vec2& prop) const {
    if (kind_ == DomainKind::product) return factor_->reflect_planar(cur, prop);
    if (planar_contains(prop)) return prop;

    Vec2 p = cur;
    Vec2 q = prop;
    int last_edge = -1;
    for (int iter = 0; iter < 16; ++iter) {
        const auto hit = grid_.first_crossing(p, q, last_edge);
        if (!hit) {
            if (planar_contains(q) || grid_.distance(q) <= kClosureTol) return q;
            break;
        }
        const Segment& e = grid_.segments()[hit->edge];
        const Vec2 d = e.b - e.a;
        const double len2 = d.norm2();
        if (len2 <= 0.0) break;
        // Mirror the leftover travel across the edge line.
        const Vec2 w = q - e.a;
        const Vec2 refl = e.a + (2.0 * (w.dot(d) / len2)) * d - w;
        p = hit->point;
        q = refl;
        last_edge = hit->edge;
        if ((q - p).norm2() == 0.0) return p;
        if (planar_contains(q)) {
            // Still verify the leg [p,q] does not exit elsewhere.
            if (!grid_.first_crossing(p, q, last_edge)) return q;
        }
    }

    // Corner pathology: project onto the closure, but never move
    // farther from x_cur than the proposed step length.
    const Vec2 proj = grid_.nearest_point(q);
    const double step_len = dist(prop, cur);
    if (dist(proj, cur) <= step_len * (1.0 + 1e-9) + 1e-15) return proj;
    const auto hit0 = grid_.first_crossing(cur, prop, -1);
    return hit0 ? hit0->point : cur;
}

Point Domain::reflect_step(const Point& x_cur, const Point& x_prop) const {
    if (kind_ == DomainKind::product) {
        const Vec2 xy = factor_->reflect_planar(x_cur.xy(), x_prop.xy());
        return Point::spatial(xy.x, xy.y, detail::fold_interval(x_prop.z, z0_, z1_));
    }
    return Point::from_xy(reflect_planar(x_cur.xy(), x_prop.xy()));
}

Point Domain::anchor() const {
    switch (kind_) {
        case DomainKind::product: {
            const Point a = factor_->anchor();
            return Point::spatial(a.x, a.y, 0.5 * (z0_ + z1_));
        }
        case DomainKind::corridor: {
            const auto& t = corridor_->tiles[corridor_->largest_tile];
            return Point::planar(t.x0 + 0.5 * t.size, t.y0 + 0.5 * t.size);
        }
        default: {
            Vec2 c{0.0, 0.0};
            for (const auto& v : ring_) c += v;
            c = c * (1.0 / static_cast<double>(ring_.size()));
            if (planar_contains(c)) return Point::from_xy(c);
            // Nonconvex fallback: nudge toward the deepest grid cell.
            const Vec2 mid{0.5 * (bbox_.lo.x + bbox_.hi.x), 0.5 * (bbox_.lo.y + bbox_.hi.y)};
            if (planar_contains(mid)) return Point::from_xy(mid);
            throw std::logic_error("anchor: no interior point found");
        }
    }
}

DomainPtr make_polygon(std::vector<Vec2> vertices) {
    if (vertices.size() < 3) throw std::invalid_argument("polygon: need >= 3 vertices");
    for (const auto& v : vertices)
        if (!std::isfinite(v.x) || !std::isfinite(v.y))
            throw std::invalid_argument("polygon: non-finite vertex");
    if (ring_signed_area(vertices) <= 0.0)
        throw std::invalid_argument("polygon: vertices must be counterclockwise");
    if (vertices.size() <= 2000) {
        const auto segs = ring_segments(vertices);
        for (std::size_t i = 0; i < segs.size(); ++i)
            for (std::size_t j = i + 2; j < segs.size(); ++j) {
                if (i == 0 && j == segs.size() - 1) continue;
                if (proper_intersection(segs[i].a, segs[i].b, segs[j].a, segs[j].b))
                    throw std::invalid_argument("polygon: self-intersecting vertex list");
            }
    }
    auto d = std::shared_ptr<Domain>(new Domain());
    d->kind_ = DomainKind::polygon;
    d->dim_ = 2;
    d->ring_ = std::move(vertices);
    d->id_ = "polygon(n=" + std::to_string(d->ring_.size()) + ")";
    d->build_planar_index();
    return d;
}

DomainPtr make_square(double side) {
    if (!(side > 0.0) || !std::isfinite(side))
        throw std::invalid_argument("square: side must be positive");
    auto d = std::shared_ptr<Domain>(new Domain());
    d->kind_ = DomainKind::polygon;
    d->dim_ = 2;
    d->ring_ = {{0.0, 0.0}, {side, 0.0}, {side, side}, {0.0, side}};
    d->boundary_dim_ = 1.0;
    d->param_side_ = side;
    std::ostringstream os;
    os << "square(side=" << side << ")";
    d->id_ = os.str();
    d->build_planar_index();
    return d;
}

DomainPtr make_koch_snowflake(int level) {
    if (level < 0 || level > 9)
        throw std::invalid_argument("snowflake: level must be in [0, 9]");
    // Equilateral triangle, circumradius 1, centered at the origin, CCW.
    const double r3 = std::sqrt(3.0);
    std::vector<Vec2> ring = {{0.0, 1.0}, {-0.5 * r3, -0.5}, {0.5 * r3, -0.5}};
    for (int l = 0; l < level; ++l) {
        std::vector<Vec2> next;
        next.reserve(ring.size() * 4);
        const std::size_t n = ring.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 a = ring[i];
            const Vec2 b = ring[(i + 1) % n];
            const Vec2 d = (b - a) * (1.0 / 3.0);
            const Vec2 p1 = a + d;
            const Vec2 p3 = a + d * 2.0;
            // Outward bump: rotate the middle third by -60 degrees
            // (clockwise), which points away from a CCW interior.
            const Vec2 m = p3 - p1;
            const Vec2 p2 = p1 + Vec2{0.5 * m.x + 0.5 * r3 * m.y, -0.5 * r3 * m.x + 0.5 * m.y};
            next.push_back(a);
            next.push_back(p1);
            next.push_back(p2);
            next.push_back(p3);
        }
        ring = std::move(next);
    }
    auto d = std::shared_ptr<Domain>(new Domain());
    d->kind_ = DomainKind::snowflake;
    d->dim_ = 2;
    d->ring_ = std::move(ring);
    d->boundary_dim_ = kLog4Log3;
    d->param_level_ = level;
    d->id_ = "snowflake(level=" + std::to_string(level) + ")";
    d->build_planar_index();
    return d;
}

DomainPtr make_product(DomainPtr planar, double height) {
    if (!planar) throw std::invalid_argument("product: null planar factor");
    if (planar->ambient_dim() != 2)
        throw std::invalid_argument("product: planar factor must have ambient_dim 2");
    if (!(height > 0.0) || !std::isfinite(height))
        throw std::invalid_argument("product: height must be positive");
    auto d = std::shared_ptr<Domain>(new Domain());
    d->kind_ = DomainKind::product;
    d->dim_ = 3;
    d->factor_ = std::move(planar);
    d->z0_ = 0.0;
    d->z1_ = height;
    d->param_height_ = height;
    if (d->factor_->analytic_boundary_dim())
        d->boundary_dim_ = 1.0 + *d->factor_->analytic_boundary_dim();
    std::ostringstream os;
    os << "product(" << d->factor_->id() << ",h=" << height << ")";
    d->id_ = os.str();
    d->bbox_ = d->factor_->planar_bbox();
    return d;
}

DomainPtr make_corridor_domain(int generations, double width_exponent) {
    if (generations < 1 || generations > 6)
        throw std::invalid_argument("corridor: generations must be in [1, 6]");
    if (!(width_exponent >= 1.0) || !std::isfinite(width_exponent))
        throw std::invalid_argument("corridor: width_exponent must be >= 1");
    auto d = std::shared_ptr<Domain>(new Domain());
    d->kind_ = DomainKind::corridor;
    d->dim_ = 2;
    d->param_generations_ = generations;
    d->param_width_exponent_ = width_exponent;
    std::ostringstream os;
    os << "corridor(g=" << generations << ",w=" << width_exponent << ")";
    d->id_ = os.str();
    d->build_planar_index();
    return d;
}

std::string Domain::to_json_string(int indent) const {
    nlohmann::json j;
    j["kind"] = to_string(kind_);
    if (boundary_dim_) j["analytic_boundary_dim"] = *boundary_dim_;
    switch (kind_) {
        case DomainKind::polygon:
            if (param_side_ > 0.0) {
                j["side"] = param_side_;
            } else {
                auto& verts = j["vertices"] = nlohmann::json::array();
                for (const auto& v : ring_) verts.push_back({v.x, v.y});
            }
            break;
        case DomainKind::snowflake:
            j["level"] = param_level_;
            break;
        case DomainKind::product:
            j["height"] = param_height_;
            j["planar"] = nlohmann::json::parse(factor_->to_json_string());
            break;
        case DomainKind::corridor:
            j["generations"] = param_generations_;
            j["width_exponent"] = param_width_exponent_;
            break;
    }
    return j.dump(indent);
}

DomainPtr domain_from_json_string(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "polygon") {
        if (j.contains("side")) return make_square(j.at("side").get<double>());
        std::vector<Vec2> verts;
        for (const auto& v : j.at("vertices"))
            verts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        return make_polygon(std::move(verts));
    }
    if (kind == "snowflake") return make_koch_snowflake(j.at("level").get<int>());
    if (kind == "product")
        return make_product(domain_from_json_string(j.at("planar").dump()),
                            j.at("height").get<double>());
    if (kind == "corridor")
        return make_corridor_domain(j.at("generations").get<int>(),
                                    j.at("width_exponent").get<double>());
    throw std::invalid_argument("domain_from_json_string: unknown kind '" + kind + "'");
}

}  // namespace rbmtrace::geom
