#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rbmtrace/geom/domain.hpp"
#include "rbmtrace/sim/rng.hpp"

using namespace rbmtrace;
using geom::Point;
using geom::Vec2;

namespace {
constexpr double kLog4Log3 = 1.2618595071429148;
}

TEST_CASE("make_square basics") {
    const auto sq = geom::make_square(1.0);
    CHECK(sq->kind() == geom::DomainKind::polygon);
    CHECK(sq->vertices().size() == 4);
    CHECK(sq->analytic_boundary_dim().value() == doctest::Approx(1.0));
    CHECK(sq->planar_bbox().lo == Vec2{0.0, 0.0});
    CHECK(sq->planar_bbox().hi == Vec2{1.0, 1.0});
    CHECK_THROWS_AS(geom::make_square(0.0), std::invalid_argument);
    CHECK_THROWS_AS(geom::make_square(-2.0), std::invalid_argument);
}

TEST_CASE("make_polygon validation") {
    CHECK_THROWS_AS(geom::make_polygon({{0, 0}, {1, 0}}), std::invalid_argument);
    // clockwise input rejected
    CHECK_THROWS_AS(geom::make_polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}),
                    std::invalid_argument);
    // self-intersecting bowtie rejected
    CHECK_THROWS_AS(geom::make_polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}),
                    std::invalid_argument);
}

TEST_CASE("snowflake edge counts 3*4^level for levels 0..9") {
    for (int level = 0; level <= 9; ++level) {
        const auto snow = geom::make_koch_snowflake(level);
        const std::size_t expected = 3u * (std::size_t{1} << (2 * level));
        CHECK(snow->vertices().size() == expected);
    }
    CHECK_THROWS_AS(geom::make_koch_snowflake(-1), std::invalid_argument);
    CHECK_THROWS_AS(geom::make_koch_snowflake(10), std::invalid_argument);
}

TEST_CASE("snowflake geometry") {
    const auto snow = geom::make_koch_snowflake(3);
    CHECK(snow->analytic_boundary_dim().value() == doctest::Approx(kLog4Log3));
    // every edge has length side/3^level with side = sqrt(3) at circumradius 1
    const double expect_len = std::sqrt(3.0) / 27.0;
    const auto& ring = snow->vertices();
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const double len = dist(ring[i], ring[(i + 1) % ring.size()]);
        CHECK(len == doctest::Approx(expect_len).epsilon(1e-9));
    }
    // centroid is interior by symmetry
    CHECK(geom::make_koch_snowflake(2)->contains(Point::planar(0.0, 0.0)));
}

TEST_CASE("contains on the unit square") {
    const auto sq = geom::make_square(1.0);
    CHECK(sq->contains(Point::planar(0.5, 0.5)));
    CHECK_FALSE(sq->contains(Point::planar(1.5, 0.5)));
    CHECK_FALSE(sq->contains(Point::planar(-0.1, 0.5)));
    CHECK_FALSE(sq->contains(Point::planar(0.5, std::nan(""))));
}

TEST_CASE("dist_to_boundary exact values") {
    const auto sq = geom::make_square(1.0);
    CHECK(sq->dist_to_boundary(Point::planar(0.5, 0.5)) == doctest::Approx(0.5));
    CHECK(sq->dist_to_boundary(Point::planar(0.1, 0.3)) == doctest::Approx(0.1));
    CHECK(sq->dist_to_boundary(Point::planar(0.0, 0.0)) == doctest::Approx(0.0));
    CHECK(sq->dist_to_boundary(Point::planar(1.0, 1.0)) == doctest::Approx(0.0));
    CHECK_THROWS_AS(sq->dist_to_boundary(Point::planar(1.5, 0.5)),
                    geom::OutsideDomainError);

    const auto snow = geom::make_koch_snowflake(4);
    for (std::size_t i = 0; i < snow->vertices().size(); i += 37) {
        const auto v = snow->vertices()[i];
        CHECK(snow->dist_to_boundary(Point::from_xy(v)) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("dist_to_boundary is 1-Lipschitz on random interior pairs") {
    const auto snow = geom::make_koch_snowflake(5);
    const auto& box = snow->planar_bbox();
    std::size_t tested = 0;
    for (std::uint64_t k = 0; tested < 300; ++k) {
        const Vec2 p{box.lo.x + box.width() * sim::u01_right_open(sim::counter_hash(1, k, 0)),
                     box.lo.y + box.height() * sim::u01_right_open(sim::counter_hash(1, k, 1))};
        const Vec2 q{box.lo.x + box.width() * sim::u01_right_open(sim::counter_hash(1, k, 2)),
                     box.lo.y + box.height() * sim::u01_right_open(sim::counter_hash(1, k, 3))};
        if (!snow->contains(Point::from_xy(p)) || !snow->contains(Point::from_xy(q))) continue;
        ++tested;
        const double dp = snow->dist_to_boundary(Point::from_xy(p));
        const double dq = snow->dist_to_boundary(Point::from_xy(q));
        CHECK(std::abs(dp - dq) <= dist(p, q) + 1e-12);
    }
}

TEST_CASE("reflect_step: interior proposals pass through") {
    const auto sq = geom::make_square(1.0);
    const Point out = sq->reflect_step(Point::planar(0.5, 0.5), Point::planar(0.6, 0.4));
    CHECK(out.x == 0.6);
    CHECK(out.y == 0.4);
}

TEST_CASE("reflect_step: mirror across the bottom edge") {
    const auto sq = geom::make_square(1.0);
    const Point out = sq->reflect_step(Point::planar(0.5, 0.05), Point::planar(0.5, -0.03));
    CHECK(out.x == doctest::Approx(0.5));
    CHECK(out.y == doctest::Approx(0.03));
}

TEST_CASE("specular reflection preserves step length across one edge") {
    const auto sq = geom::make_square(1.0);
    for (std::uint64_t k = 0; k < 200; ++k) {
        const double x = 0.1 + 0.8 * sim::u01_right_open(sim::counter_hash(2, k, 0));
        const double y = 0.01 + 0.04 * sim::u01_right_open(sim::counter_hash(2, k, 1));
        const double dx = 0.02 * (sim::u01_right_open(sim::counter_hash(2, k, 2)) - 0.5);
        const double dy = -y - 0.03 * sim::u01_right_open(sim::counter_hash(2, k, 3));
        const Vec2 cur{x, y};
        const Vec2 prop{x + dx, y + dy};
        if (prop.y >= 0.0) continue;  // want a single crossing of y = 0
        const Point out = sq->reflect_step(Point::from_xy(cur), Point::from_xy(prop));
        const double t = cur.y / (cur.y - prop.y);
        const Vec2 hit{cur.x + t * (prop.x - cur.x), 0.0};
        const double len_in = dist(cur, prop);
        const double len_out = dist(cur, hit) + dist(hit, {out.x, out.y});
        CHECK(len_out == doctest::Approx(len_in).epsilon(1e-9));
        CHECK(sq->in_closure(out));
    }
}

TEST_CASE("reflect_step stays in the closure near corners") {
    const auto sq = geom::make_square(1.0);
    for (std::uint64_t k = 0; k < 500; ++k) {
        // aim hard at the square corner
        const Vec2 cur{0.004 + 0.01 * sim::u01_right_open(sim::counter_hash(3, k, 0)),
                       0.004 + 0.01 * sim::u01_right_open(sim::counter_hash(3, k, 1))};
        const Vec2 prop{cur.x - 0.02 * sim::u01_right_open(sim::counter_hash(3, k, 2)),
                        cur.y - 0.02 * sim::u01_right_open(sim::counter_hash(3, k, 3))};
        const Point out = sq->reflect_step(Point::from_xy(cur), Point::from_xy(prop));
        CHECK(sq->in_closure(out));
        const double step = dist(cur, prop);
        CHECK(dist({out.x, out.y}, cur) <= step * (1.0 + 1e-9) + 1e-12);
    }
    // spiky prefractal corners
    const auto snow = geom::make_koch_snowflake(4);
    const auto& ring = snow->vertices();
    for (std::uint64_t k = 0; k < 500; ++k) {
        const auto v = ring[(k * 97) % ring.size()];
        const Vec2 inward = Vec2{0, 0} - v;
        const double n = inward.norm();
        const Vec2 cur = v + inward * (0.01 / n);
        const Vec2 prop = v + inward * (-0.01 / n);
        if (!snow->in_closure(Point::from_xy(cur))) continue;
        const Point out = snow->reflect_step(Point::from_xy(cur), Point::from_xy(prop));
        CHECK(snow->in_closure(out));
    }
}

TEST_CASE("product domain construction and queries") {
    const auto snow = geom::make_koch_snowflake(2);
    const auto box = geom::make_product(geom::make_square(1.0), 1.0);
    CHECK(box->ambient_dim() == 3);
    CHECK(box->analytic_boundary_dim().value() == doctest::Approx(2.0));

    const auto prism = geom::make_product(snow, 1.0);
    CHECK(prism->analytic_boundary_dim().value() == doctest::Approx(1.0 + kLog4Log3));
    CHECK(prism->interval() == std::pair<double, double>{0.0, 1.0});
    CHECK(prism->planar_bbox().lo.x == snow->planar_bbox().lo.x);

    CHECK(box->contains(Point::spatial(0.5, 0.5, 0.5)));
    CHECK_FALSE(box->contains(Point::spatial(0.5, 0.5, 1.5)));
    CHECK(box->dist_to_boundary(Point::spatial(0.5, 0.5, 0.9)) == doctest::Approx(0.1));

    CHECK_THROWS_AS(geom::make_product(box, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(geom::make_product(snow, 0.0), std::invalid_argument);
}

TEST_CASE("corridor: connectivity and construction") {
    const auto c1 = geom::make_corridor_domain(1, 1.0);
    CHECK(c1->kind() == geom::DomainKind::corridor);
    CHECK(c1->contains(c1->anchor()));
    CHECK_FALSE(c1->analytic_boundary_dim().has_value());

    const auto c3 = geom::make_corridor_domain(3, 2.0);
    CHECK(c3->contains(c3->anchor()));

    CHECK_THROWS_AS(geom::make_corridor_domain(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(geom::make_corridor_domain(7, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(geom::make_corridor_domain(3, 0.5), std::invalid_argument);
    // widths exp(-g^4) fall below the slit floor at deeper generations
    CHECK_THROWS_AS(geom::make_corridor_domain(4, 4.0), std::invalid_argument);
}

TEST_CASE("corridor: fat Cantor measure and slit summability") {
    // removed length after g rounds is (1 - 2^-g)/2, so the kept
    // measure is 1/2 + 2^-(g+1) per axis -> area(B) = 1/4 in the limit
    for (int g = 1; g <= 6; ++g) {
        const auto kept = geom::fat_cantor_intervals(g);
        CHECK(kept.size() == (std::size_t{1} << g));
        double len = 0.0;
        for (const auto& [a, b] : kept) len += b - a;
        CHECK(len == doctest::Approx(0.5 + std::ldexp(0.5, -g)).epsilon(1e-14));
    }
    // width_exponent = 3: 1/log(1/eps_g) = g^-3, whose series converges
    // (to zeta(3)); widths themselves underflow past g = 8
    for (int g = 1; g <= 8; ++g)
        CHECK(std::log(1.0 / geom::corridor_slit_width(g, 3.0)) ==
              doctest::Approx(std::pow(g, 3.0)).epsilon(1e-12));
    double sum = 0.0;
    for (int g = 1; g <= 4096; ++g) sum += 1.0 / std::pow(g, 3.0);
    CHECK(sum == doctest::Approx(1.2020569031595943).epsilon(1e-7));
}

TEST_CASE("corridor: reflected proposals stay inside") {
    const auto c = geom::make_corridor_domain(2, 1.5);
    const auto a = c->anchor();
    CHECK(c->dist_to_boundary(a) > 0.0);
    for (std::uint64_t k = 0; k < 2000; ++k) {
        const Vec2 cur{a.x, a.y};
        const Vec2 prop{a.x + 0.4 * (sim::u01_right_open(sim::counter_hash(4, k, 0)) - 0.5),
                        a.y + 0.4 * (sim::u01_right_open(sim::counter_hash(4, k, 1)) - 0.5)};
        const Point out = c->reflect_step(Point::from_xy(cur), Point::from_xy(prop));
        CHECK(c->in_closure(out));
    }
}

TEST_CASE("json round trip reproduces domains byte for byte") {
    const auto square = geom::make_square(2.5);
    const auto snow = geom::make_koch_snowflake(3);
    const auto prism = geom::make_product(geom::make_koch_snowflake(2), 1.0);
    const auto corridor = geom::make_corridor_domain(2, 1.5);
    for (const auto& d : {square, snow, prism, corridor}) {
        const std::string text = d->to_json_string();
        const auto copy = geom::domain_from_json_string(text);
        CHECK(copy->to_json_string() == text);
        REQUIRE(copy->vertices().size() == d->vertices().size());
        for (std::size_t i = 0; i < d->vertices().size(); ++i)
            CHECK(copy->vertices()[i] == d->vertices()[i]);
    }
    const auto poly = geom::make_polygon({{0, 0}, {2, 0}, {2, 1}, {0, 1}});
    const auto poly2 = geom::domain_from_json_string(poly->to_json_string());
    CHECK(poly2->vertices() == poly->vertices());
}

TEST_CASE("anchor is interior for all shipped domains") {
    for (const auto& d :
         {geom::make_square(1.0), geom::make_square(3.0), geom::make_koch_snowflake(7),
          geom::make_product(geom::make_koch_snowflake(5), 1.0),
          geom::make_corridor_domain(3, 1.0), geom::make_corridor_domain(3, 2.0)}) {
        CHECK(d->contains(d->anchor()));
        CHECK(d->dist_to_boundary(d->anchor()) > 0.0);
    }
}
