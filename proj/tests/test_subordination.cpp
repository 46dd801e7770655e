#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rbmtrace/fracdim/boxcount.hpp"
#include "rbmtrace/geom/domain.hpp"
#include "rbmtrace/sim/rbm.hpp"
#include "rbmtrace/subord/subordinator.hpp"

using namespace rbmtrace;
using geom::Point;

namespace {

struct MeanVar {
    double mean, se;
};

// Empirical E[exp(-lambda * xi_1)] with xi_1 accumulated through the
// sampled path increments.
MeanVar laplace_at_one(double s, double lambda, int n_samples, std::uint64_t seed0) {
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const auto xi = subord::sample_subordinator(s, 1.0, 1e-2, seed0 + i);
        const double v = std::exp(-lambda * xi.values.back());
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n_samples;
    const double var = std::max(0.0, sum2 / n_samples - mean * mean);
    return {mean, std::sqrt(var / n_samples)};
}

}  // namespace

TEST_CASE("sample_subordinator: basic invariants") {
    CHECK_THROWS_AS(subord::sample_subordinator(0.0, 1.0, 1e-2, 1), std::invalid_argument);
    CHECK_THROWS_AS(subord::sample_subordinator(1.0, 1.0, 1e-2, 1), std::invalid_argument);
    CHECK_THROWS_AS(subord::sample_subordinator(-0.5, 1.0, 1e-2, 1), std::invalid_argument);

    for (double s : {0.2, 0.5, 0.8}) {
        for (std::uint64_t seed : {1ull, 77ull, 123456ull}) {
            const auto xi = subord::sample_subordinator(s, 2.0, 1e-2, seed);
            CHECK(xi.values[0] == 0.0);
            CHECK(xi.values.size() == 201);
            for (std::size_t k = 1; k < xi.values.size(); ++k) {
                CHECK(xi.values[k] >= xi.values[k - 1]);
                CHECK(std::isfinite(xi.values[k]));
            }
        }
    }
}

TEST_CASE("subordinator matches its Laplace transform at lambda = 1") {
    // oracle: E[exp(-lambda xi_t)] = exp(-t lambda^s)
    const auto mv = laplace_at_one(0.5, 1.0, 100000, 1000000);
    CHECK(std::abs(mv.mean - std::exp(-1.0)) <= 3.0 * mv.se);
}

TEST_CASE("subordinator Laplace transform at lambda = 0.5 and 2") {
    for (double lambda : {0.5, 2.0}) {
        const auto mv = laplace_at_one(0.5, lambda, 100000, 2000000);
        const double target = std::exp(-std::pow(lambda, 0.5));
        CHECK(std::abs(mv.mean - target) <= 3.0 * mv.se);
    }
}

TEST_CASE("scaling self-similarity: xi_{ct} / c^{1/s} has the same law") {
    // two-sample comparison of E[exp(-xi)] at c = 2, s = 0.5, lambda = 1
    const double s = 0.5, c = 2.0;
    const int n = 100000;
    double sum_a = 0, sum2_a = 0, sum_b = 0, sum2_b = 0;
    for (int i = 0; i < n; ++i) {
        const auto xi2 = subord::sample_subordinator(s, c, 2e-2, 3000000 + i);
        const double a = std::exp(-xi2.values.back() / std::pow(c, 1.0 / s));
        sum_a += a;
        sum2_a += a * a;
        const auto xi1 = subord::sample_subordinator(s, 1.0, 1e-2, 4000000 + i);
        const double b = std::exp(-xi1.values.back());
        sum_b += b;
        sum2_b += b * b;
    }
    const double ma = sum_a / n, mb = sum_b / n;
    const double se = std::sqrt((std::max(0.0, sum2_a / n - ma * ma) +
                                 std::max(0.0, sum2_b / n - mb * mb)) /
                                n);
    CHECK(std::abs(ma - mb) <= 3.0 * se);
}

TEST_CASE("subordinate_path: identity grid reproduces x bitwise") {
    const auto sq = geom::make_square(1.0);
    const auto x = sim::simulate_rbm(sq, Point::planar(0.5, 0.5), 1.0, 1e-3, 11);

    subord::SubordinatorPath id;
    id.s = 0.5;
    id.dt = x.dt();
    id.seed = 0;
    for (std::size_t k = 0; k <= x.steps(); ++k)
        id.values.push_back(static_cast<double>(k) * x.dt());

    const auto z = subord::subordinate_path(x, id);
    REQUIRE(z.flat().size() == x.flat().size());
    for (std::size_t i = 0; i < x.flat().size(); ++i) CHECK(z.flat()[i] == x.flat()[i]);
}

TEST_CASE("subordinate_path: constant zero subordinator freezes at x0") {
    const auto sq = geom::make_square(1.0);
    const auto x = sim::simulate_rbm(sq, Point::planar(0.25, 0.75), 1.0, 1e-3, 12);
    subord::SubordinatorPath zero;
    zero.s = 0.5;
    zero.dt = 1e-3;
    zero.values.assign(101, 0.0);
    const auto z = subord::subordinate_path(x, zero);
    for (std::size_t k = 0; k < z.size(); ++k) {
        CHECK(z.point(k).x == 0.25);
        CHECK(z.point(k).y == 0.75);
    }
}

TEST_CASE("subordinate_path: horizon overflow rejected") {
    const auto sq = geom::make_square(1.0);
    const auto x = sim::simulate_rbm(sq, Point::planar(0.5, 0.5), 0.1, 1e-3, 13);
    subord::SubordinatorPath xi;
    xi.s = 0.5;
    xi.dt = 1e-3;
    xi.values = {0.0, 0.05, 0.2};  // exceeds T = 0.1
    CHECK_THROWS_AS(subord::subordinate_path(x, xi), std::invalid_argument);
}

TEST_CASE("preimage_timeset: full and empty sets") {
    const auto xi = subord::sample_subordinator(0.7, 1.0, 1e-2, 21);
    sim::TimeSet full(std::max(xi.max() * 1.1, 1.0), 1e-2);
    full.mark_all();
    const auto c_full = subord::preimage_timeset(xi, full);
    CHECK(c_full.count() == c_full.n_cells());

    sim::TimeSet empty(std::max(xi.max() * 1.1, 1.0), 1e-2);
    const auto c_empty = subord::preimage_timeset(xi, empty);
    CHECK(c_empty.count() == 0);

    sim::TimeSet short_e(xi.max() * 0.5, 1e-2);
    CHECK_THROWS_AS(subord::preimage_timeset(xi, short_e), std::invalid_argument);
}

TEST_CASE("preimage of a Cantor set keeps dimension above s + dim E - 1") {
    // lower bound s + dim E - 1 = 0.8 + 0.6309 - 1 = 0.4309, slack -0.1
    const double s = 0.8;
    const double bound = 0.4309297535714574;
    double mean_slope = 0.0;
    const int n_paths = 8;
    for (int p = 0; p < n_paths; ++p) {
        const auto xi = subord::sample_subordinator(s, 1.0, 1e-5, 5000 + p);
        fracdim::CantorSpec spec{2, 1.0 / 3.0, 10, xi.max() * 1.000001};
        const auto e = fracdim::cantor_timeset(spec, xi.max() * 1.000001 * 1e-6);
        const auto c = subord::preimage_timeset(xi, e);
        REQUIRE(c.count() > 0);
        const auto [scales, counts] =
            fracdim::box_counts_time(c, 0, static_cast<int>(std::log2(c.n_cells() / 4.0)));
        std::vector<std::size_t> caps;
        for (std::size_t k = 0; k < scales.size(); ++k) caps.push_back(std::size_t{1} << k);
        mean_slope += fracdim::fit_loglog(scales, counts, true, caps).slope;
    }
    mean_slope /= n_paths;
    CHECK(mean_slope >= bound - 0.1);
}

TEST_CASE("subordinator CSV export") {
    const auto xi = subord::sample_subordinator(0.5, 0.1, 1e-2, 31);
    std::ostringstream os;
    xi.to_csv(os);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "t,xi");
    std::size_t rows = 0;
    for (std::string line; std::getline(is, line);) ++rows;
    CHECK(rows == xi.values.size());
}
