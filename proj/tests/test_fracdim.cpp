#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rbmtrace/fracdim/boxcount.hpp"
#include "rbmtrace/geom/domain.hpp"
#include "rbmtrace/sim/rbm.hpp"
#include "rbmtrace/sim/rng.hpp"

using namespace rbmtrace;
using geom::Point;

namespace {
constexpr double kLog2Log3 = 0.6309297535714574;
constexpr double kLog4Log3 = 1.2618595071429148;
}

TEST_CASE("box_counts_time: full interval and single point") {
    sim::TimeSet full(1.0, 1e-3);
    full.mark_all();
    const auto [scales, counts] = fracdim::box_counts_time(full, 0, 6);
    for (std::size_t i = 0; i < counts.size(); ++i)
        CHECK(counts[i] == (std::size_t{1} << i));

    sim::TimeSet point(1.0, 1e-3);
    point.mark(377);
    const auto [s2, c2] = fracdim::box_counts_time(point, 0, 6);
    for (std::size_t c : c2) CHECK((c == 1 || c == 2));

    CHECK_THROWS_AS(fracdim::box_counts_time(full, 3, 3), std::invalid_argument);
    CHECK_THROWS_AS(fracdim::box_counts_time(full, 0, 9), std::invalid_argument);
}

TEST_CASE("middle-thirds Cantor time set fits its analytic dimension") {
    fracdim::CantorSpec spec{2, 1.0 / 3.0, 12, 1.0};
    const auto ts = fracdim::cantor_timeset(spec, 1e-6);
    const auto [scales, counts] = fracdim::box_counts_time(ts, 0, 17);
    std::vector<std::size_t> caps;
    for (int k = 0; k <= 17; ++k) caps.push_back(std::size_t{1} << k);
    const auto est = fracdim::fit_loglog(scales, counts, true, caps);
    CHECK(est.slope == doctest::Approx(kLog2Log3).epsilon(0.032));  // +/- 0.02
    CHECK(est.r2 > 0.99);
}

TEST_CASE("cantor_timeset: analytic dimensions and validation") {
    CHECK(fracdim::CantorSpec{2, 1.0 / 3.0, 8, 1.0}.analytic_dim() ==
          doctest::Approx(kLog2Log3));
    CHECK(fracdim::CantorSpec{2, 0.25, 8, 1.0}.analytic_dim() == doctest::Approx(0.5));
    CHECK(fracdim::CantorSpec{3, 0.2, 8, 1.0}.analytic_dim() ==
          doctest::Approx(0.6826061944859853));

    CHECK_THROWS_AS((fracdim::CantorSpec{1, 0.3, 8, 1.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((fracdim::CantorSpec{2, 0.6, 8, 1.0}).validate(), std::invalid_argument);
    // depth beyond the grid resolution
    fracdim::CantorSpec deep{2, 1.0 / 3.0, 14, 1.0};
    CHECK_THROWS_AS(fracdim::cantor_timeset(deep, 1e-6), std::invalid_argument);
}

TEST_CASE("box_counts_space: single point and filled square") {
    const std::vector<geom::Point> one{Point::planar(0.3, 0.4)};
    const auto [s1, c1] = fracdim::box_counts_space(one, 2, 0, 6);
    for (std::size_t c : c1) CHECK(c == 1);

    std::vector<geom::Point> grid;
    for (int i = 0; i < 256; ++i)
        for (int j = 0; j < 256; ++j)
            grid.push_back(Point::planar((i + 0.5) / 256.0, (j + 0.5) / 256.0));
    const auto [s2, c2] = fracdim::box_counts_space(grid, 2, 0, 8);
    const auto est = fracdim::fit_loglog(s2, c2, true);
    CHECK(est.slope == doctest::Approx(2.0).epsilon(0.025));  // +/- 0.05

    CHECK_THROWS_AS(fracdim::box_counts_space({}, 2, 0, 6), std::invalid_argument);
}

TEST_CASE("box_counts_space: Koch vertex cloud at level 7") {
    const auto snow = geom::make_koch_snowflake(7);
    std::vector<geom::Point> pts;
    for (const auto& v : snow->vertices()) pts.push_back(Point::from_xy(v));
    const auto [scales, counts] = fracdim::box_counts_space(pts, 2, 0, 9);
    const auto est = fracdim::fit_loglog(scales, counts, true);
    CHECK(est.slope == doctest::Approx(kLog4Log3).epsilon(0.04));  // +/- 0.05
}

TEST_CASE("fit_loglog: exact slopes and degenerate input") {
    const std::vector<double> scales{1.0, 0.5, 0.25, 0.125, 0.0625};
    const std::vector<std::size_t> doubling{2, 4, 8, 16, 32};
    const auto est = fracdim::fit_loglog(scales, doubling, false);
    CHECK(est.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(est.r2 == doctest::Approx(1.0));
    CHECK(est.stderr_ == doctest::Approx(0.0).epsilon(1e-9));

    const std::vector<std::size_t> constant{7, 7, 7, 7, 7};
    CHECK(fracdim::fit_loglog(scales, constant, false).slope == doctest::Approx(0.0));

    CHECK_THROWS_AS(fracdim::fit_loglog({1.0, 0.5, 0.25}, {1, 2, 4}, false),
                    std::invalid_argument);
    CHECK_THROWS_AS(fracdim::fit_loglog({1.0, 0.5, 0.5, 0.25}, {1, 2, 3, 4}, false),
                    std::invalid_argument);
    CHECK_THROWS_AS(fracdim::fit_loglog(scales, {1, 2, 0, 8, 16}, false),
                    std::invalid_argument);
}

TEST_CASE("fit_loglog: auto window excludes a saturated finest scale") {
    // oracle: fit on the manually truncated data
    std::vector<double> scales;
    std::vector<std::size_t> counts;
    for (int k = 0; k <= 8; ++k) {
        scales.push_back(std::ldexp(1.0, -k));
        counts.push_back(std::size_t{1} << static_cast<int>(std::round(1.0 * k)) / 1);
    }
    // saturate the two finest scales (undercounted: grid-resolution cap)
    counts[7] = counts[6] + 5;
    counts[8] = counts[7] + 3;
    const auto manual =
        fracdim::fit_loglog({scales.begin(), scales.end() - 2},
                            {counts.begin(), counts.end() - 2}, false);
    const auto est = fracdim::fit_loglog(scales, counts, true);
    CHECK(est.window_hi <= 6);
    CHECK(est.slope == doctest::Approx(manual.slope).epsilon(0.01));
}

TEST_CASE("fit_loglog: auto window needs 4 usable scales") {
    // everything except three scales falls to the count<8 filter
    const std::vector<double> scales{1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125};
    const std::vector<std::size_t> counts{1, 2, 4, 9, 12, 20};
    CHECK_THROWS_AS(fracdim::fit_loglog(scales, counts, true), std::invalid_argument);
}

TEST_CASE("box counts are monotone for nested sets") {
    sim::TimeSet small(1.0, 1e-4);
    sim::TimeSet big(1.0, 1e-4);
    for (std::size_t i = 0; i < small.n_cells(); ++i) {
        const double u = sim::u01_right_open(sim::counter_hash(5, i, 0));
        if (u < 0.02) {
            small.mark(i);
            big.mark(i);
        } else if (u < 0.06) {
            big.mark(i);
        }
    }
    const auto [sa, ca] = fracdim::box_counts_time(small, 0, 10);
    const auto [sb, cb] = fracdim::box_counts_time(big, 0, 10);
    for (std::size_t i = 0; i < ca.size(); ++i) CHECK(ca[i] <= cb[i]);

    // spatial version on nested point clouds
    std::vector<geom::Point> pa, pb;
    for (std::uint64_t k = 0; k < 4000; ++k) {
        const Point p = Point::planar(sim::u01_right_open(sim::counter_hash(6, k, 0)),
                                      sim::u01_right_open(sim::counter_hash(6, k, 1)));
        pb.push_back(p);
        if (k % 3 == 0) pa.push_back(p);
    }
    const auto [ssa, cca] = fracdim::box_counts_space(pa, 2, 0, 7);
    const auto [ssb, ccb] = fracdim::box_counts_space(pb, 2, 0, 7);
    // grids anchored at each cloud's own bbox; pa's bbox sits inside
    // pb's, so compare at matched scale indices only loosely
    for (std::size_t i = 0; i < cca.size(); ++i) CHECK(cca[i] <= ccb[i] * 2);
}

TEST_CASE("fitted slope is stable under dilation") {
    const auto snow = geom::make_koch_snowflake(6);
    std::vector<geom::Point> pts, pts2;
    for (const auto& v : snow->vertices()) {
        pts.push_back(Point::from_xy(v));
        pts2.push_back(Point::planar(2.0 * v.x, 2.0 * v.y));
    }
    const auto [s1, c1] = fracdim::box_counts_space(pts, 2, 0, 8);
    const auto [s2, c2] = fracdim::box_counts_space(pts2, 2, 0, 8);
    const auto e1 = fracdim::fit_loglog(s1, c1, true);
    const auto e2 = fracdim::fit_loglog(s2, c2, true);
    CHECK(std::abs(e1.slope - e2.slope) <= 0.01);
    for (std::size_t i = 0; i < c1.size(); ++i) CHECK(c1[i] == c2[i]);
}

TEST_CASE("image_dimension: degenerate and dimension-doubling cases") {
    const auto sq = geom::make_square(1.0);
    const auto path = sim::simulate_rbm(sq, Point::planar(0.5, 0.5), 10.0, 1e-4, 314);

    {   // single marked cell -> slope 0
        sim::TimeSet e(10.0, 1e-4);
        e.mark(500);
        const auto est = fracdim::image_dimension(path, e, 0, 8);
        CHECK(est.slope == doctest::Approx(0.0));
    }
    {   // empty image rejected
        sim::TimeSet e(10.0, 1e-4);
        CHECK_THROWS_AS(fracdim::image_dimension(path, e, 0, 8), std::invalid_argument);
    }
    {   // grid mismatch rejected
        sim::TimeSet e(10.0, 2e-4);
        e.mark(1);
        CHECK_THROWS_AS(fracdim::image_dimension(path, e, 0, 8), std::invalid_argument);
    }
}

TEST_CASE("image of the full interval fills the plane region") {
    // oracle: an unreflected planar Brownian path from the same
    // increments has full box dimension; compare both fits
    const double T = 10.0, dt = 1e-4;
    const std::uint64_t seed = 2718;
    const auto sq = geom::make_square(1.0);
    const auto path = sim::simulate_rbm(sq, Point::planar(0.5, 0.5), T, dt, seed);

    sim::TimeSet full(T, dt);
    full.mark_all();
    const int k_max = 8;
    const auto est = fracdim::image_dimension(path, full, 0, k_max);
    CHECK(est.slope == doctest::Approx(2.0).epsilon(0.05));  // 2 +/- 0.1

    const std::size_t steps = sim::grid_steps(T, dt);
    std::vector<geom::Point> free_pts;
    double x = 0.5, y = 0.5;
    free_pts.push_back(Point::planar(x, y));
    for (std::size_t k = 0; k < steps; ++k) {
        x += std::sqrt(dt) * sim::counter_normal(seed, k, 0);
        y += std::sqrt(dt) * sim::counter_normal(seed, k, 1);
        free_pts.push_back(Point::planar(x, y));
    }
    const auto [fs, fc] = fracdim::box_counts_space(free_pts, 2, 0, k_max);
    const auto free_est = fracdim::fit_loglog(fs, fc, true);
    CHECK(std::abs(free_est.slope - est.slope) <= 0.15);
}

TEST_CASE("image of a Cantor time set doubles its dimension") {
    const auto sq = geom::make_square(1.0);
    const double T = 10.0, dt = 1e-4;
    fracdim::CantorSpec spec{2, 1.0 / 3.0, 8, T};
    const auto e = fracdim::cantor_timeset(spec, dt);
    double mean = 0.0;
    const int n_paths = 4;
    for (int p = 0; p < n_paths; ++p) {
        const auto path = sim::simulate_rbm(sq, Point::planar(0.5, 0.5), T, dt, 8100 + p);
        mean += fracdim::image_dimension(path, e, 0, 8).slope;
    }
    mean /= n_paths;
    CHECK(mean == doctest::Approx(2.0 * kLog2Log3).epsilon(0.12));  // +/- 0.15
}

TEST_CASE("DimensionEstimate exports") {
    fracdim::DimensionEstimate est;
    est.scales = {1.0, 0.5};
    est.counts = {3, 6};
    est.slope = 1.0;
    est.r2 = 1.0;
    est.window_lo = 0;
    est.window_hi = 1;
    std::ostringstream os;
    est.to_csv(os);
    CHECK(os.str() == "scale,count,used\n1,3,1\n0.5,6,1\n");
    const auto j = est.to_json_string();
    CHECK(j.find("\"slope\":1.0") != std::string::npos);
    CHECK(j.find("box-counting") != std::string::npos);
}
