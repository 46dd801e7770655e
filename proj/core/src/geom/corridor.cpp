#include "corridor_data.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>

#include "rbmtrace/geom/domain.hpp"

namespace rbmtrace::geom {

std::vector<std::pair<double, double>> fat_cantor_intervals(int generations) {
    std::vector<std::pair<double, double>> kept{{0.0, 1.0}};
    for (int k = 1; k <= generations; ++k) {
        const double half = 0.5 * std::pow(0.25, k);
        std::vector<std::pair<double, double>> next;
        next.reserve(kept.size() * 2);
        for (const auto& [l, r] : kept) {
            const double c = 0.5 * (l + r);
            next.emplace_back(l, c - half);
            next.emplace_back(c + half, r);
        }
        kept = std::move(next);
    }
    return kept;
}

double corridor_slit_width(int generation, double width_exponent) {
    return std::exp(-std::pow(static_cast<double>(generation), width_exponent));
}

namespace detail {

namespace {

// Slits narrower than this are treated as closed: the tiling they
// would join counts as disconnected.
constexpr double kMinSlitWidth = 1e-14;

struct IntervalSet {
    std::vector<std::pair<double, double>> iv;  // sorted, disjoint

    double overlap_len(double a, double b) const {
        double total = 0.0;
        for (const auto& [l, r] : iv) {
            const double lo = std::max(a, l), hi = std::min(b, r);
            if (hi > lo) total += hi - lo;
        }
        return total;
    }
    bool covers(double a, double b) const {
        for (const auto& [l, r] : iv)
            if (l <= a && b <= r) return true;
        return false;
    }
};

struct EdgeRef {
    double lo, hi;  // extent along the wall
    int tile;
    bool facing_pos;  // true when the tile lies on the negative side
};

struct Adjacency {
    int a, b;        // tile indices
    bool vertical;
    double coord;
    double lo, hi;   // shared extent
    int generation;  // slit generation label
};

}  // namespace

CorridorData build_corridor(int generations, double width_exponent,
                            std::vector<Segment>& boundary_out) {
    CorridorData cd;
    cd.generations = generations;
    cd.width_exponent = width_exponent;

    IntervalSet kept;
    kept.iv = fat_cantor_intervals(generations);
    const int max_depth = 2 * generations + 1;  // resolves all SVC endpoints exactly

    // Quadtree over [0,1]^2: white leaves tile the complement of the
    // fat-Cantor product, black leaves cover the product itself.
    struct Work {
        int node;
        int depth;
    };
    cd.nodes.push_back({0.0, 0.0, 1.0});
    std::deque<Work> work{{0, 0}};
    while (!work.empty()) {
        const auto [ni, depth] = work.front();
        work.pop_front();
        const double x0 = cd.nodes[ni].x0, y0 = cd.nodes[ni].y0, s = cd.nodes[ni].size;
        const double ox = kept.overlap_len(x0, x0 + s);
        const double oy = kept.overlap_len(y0, y0 + s);
        if (ox <= 0.0 || oy <= 0.0) {
            cd.nodes[ni].tile = static_cast<int>(cd.tiles.size());
            cd.tiles.push_back({x0, y0, s, depth});
            continue;
        }
        if (kept.covers(x0, x0 + s) && kept.covers(y0, y0 + s)) {
            cd.nodes[ni].black = true;
            continue;
        }
        if (depth >= max_depth) {
            // Dyadic alignment guarantees full coverage here.
            cd.nodes[ni].black = true;
            continue;
        }
        const double hs = s * 0.5;
        const double cx[4] = {x0, x0 + hs, x0, x0 + hs};
        const double cy[4] = {y0, y0, y0 + hs, y0 + hs};
        for (int q = 0; q < 4; ++q) {
            cd.nodes[ni].child[q] = static_cast<int>(cd.nodes.size());
            cd.nodes.push_back({cx[q], cy[q], hs});
            work.push_back({cd.nodes[ni].child[q], depth + 1});
        }
    }
    if (cd.tiles.empty()) throw std::invalid_argument("corridor: no white tiles");
    for (std::size_t t = 0; t < cd.tiles.size(); ++t)
        if (cd.tiles[t].size > cd.tiles[cd.largest_tile].size)
            cd.largest_tile = static_cast<int>(t);

    // Shared walls between white tiles: group tile edges by wall line
    // (coordinates are exact dyadic doubles) and intersect extents.
    std::vector<Adjacency> adj;
    auto match_edges = [&](bool vertical) {
        std::map<double, std::vector<EdgeRef>> walls;
        for (int t = 0; t < static_cast<int>(cd.tiles.size()); ++t) {
            const auto& tile = cd.tiles[t];
            if (vertical) {
                walls[tile.x0].push_back({tile.y0, tile.y0 + tile.size, t, false});
                walls[tile.x0 + tile.size].push_back({tile.y0, tile.y0 + tile.size, t, true});
            } else {
                walls[tile.y0].push_back({tile.x0, tile.x0 + tile.size, t, false});
                walls[tile.y0 + tile.size].push_back({tile.x0, tile.x0 + tile.size, t, true});
            }
        }
        for (auto& [coord, refs] : walls) {
            std::vector<EdgeRef> neg, pos;
            for (const auto& r : refs) (r.facing_pos ? neg : pos).push_back(r);
            std::sort(neg.begin(), neg.end(), [](auto& a, auto& b) { return a.lo < b.lo; });
            std::sort(pos.begin(), pos.end(), [](auto& a, auto& b) { return a.lo < b.lo; });
            // Extents on each side of a wall line are disjoint, so a
            // monotone sweep finds all overlapping pairs.
            std::size_t j = 0;
            for (const auto& n : neg) {
                while (j < pos.size() && pos[j].hi <= n.lo) ++j;
                for (std::size_t i = j; i < pos.size() && pos[i].lo < n.hi; ++i) {
                    const double lo = std::max(n.lo, pos[i].lo);
                    const double hi = std::min(n.hi, pos[i].hi);
                    if (hi > lo) {
                        const int depth = std::max(cd.tiles[n.tile].depth,
                                                   cd.tiles[pos[i].tile].depth);
                        const int gen = std::clamp((depth + 1) / 2, 1, generations);
                        adj.push_back({n.tile, pos[i].tile, vertical, coord, lo, hi, gen});
                    }
                }
            }
        }
    };
    match_edges(true);
    match_edges(false);

    // Spanning tree over walls whose slit width is representable;
    // anything unreachable means the requested widths disconnect the
    // tiling.
    std::vector<std::vector<int>> graph(cd.tiles.size());
    for (int e = 0; e < static_cast<int>(adj.size()); ++e) {
        if (corridor_slit_width(adj[e].generation, width_exponent) < kMinSlitWidth) continue;
        graph[adj[e].a].push_back(e);
        graph[adj[e].b].push_back(e);
    }
    std::vector<int> tree_edge(cd.tiles.size(), -1);
    std::vector<std::uint8_t> reached(cd.tiles.size(), 0);
    std::deque<int> queue{cd.largest_tile};
    reached[cd.largest_tile] = 1;
    std::size_t n_reached = 1;
    while (!queue.empty()) {
        const int t = queue.front();
        queue.pop_front();
        for (int e : graph[t]) {
            const int other = adj[e].a == t ? adj[e].b : adj[e].a;
            if (!reached[other]) {
                reached[other] = 1;
                tree_edge[other] = e;
                ++n_reached;
                queue.push_back(other);
            }
        }
    }
    if (n_reached != cd.tiles.size())
        throw std::invalid_argument(
            "corridor: slit widths disconnect the tiling (flood fill failed): reached " +
            std::to_string(n_reached) + " of " + std::to_string(cd.tiles.size()) + " tiles");

    // One slit per tree edge, centered in the shared wall.
    std::vector<std::pair<double, double>> gap_of(adj.size(), {0.0, -1.0});
    for (int t = 0; t < static_cast<int>(cd.tiles.size()); ++t) {
        const int e = tree_edge[t];
        if (e < 0) continue;
        const double len = adj[e].hi - adj[e].lo;
        const double w = std::min(corridor_slit_width(adj[e].generation, width_exponent),
                                  0.5 * len);
        const double mid = 0.5 * (adj[e].lo + adj[e].hi);
        gap_of[e] = {mid - 0.5 * w, mid + 0.5 * w};
        cd.slits.push_back({adj[e].vertical, adj[e].coord, mid - 0.5 * w, mid + 0.5 * w});
    }

    // Boundary soup: shared walls minus their slits, plus tile edges
    // facing the black set or the outer square.
    auto emit = [&](bool vertical, double coord, double lo, double hi) {
        if (hi - lo <= 0.0) return;
        if (vertical)
            boundary_out.push_back({{coord, lo}, {coord, hi}});
        else
            boundary_out.push_back({{lo, coord}, {hi, coord}});
    };
    for (int e = 0; e < static_cast<int>(adj.size()); ++e) {
        const auto& w = adj[e];
        if (gap_of[e].second >= gap_of[e].first) {
            emit(w.vertical, w.coord, w.lo, gap_of[e].first);
            emit(w.vertical, w.coord, gap_of[e].second, w.hi);
        } else {
            emit(w.vertical, w.coord, w.lo, w.hi);
        }
    }
    // Uncovered tile-edge pieces (no white neighbor on the other side).
    std::map<std::pair<bool, double>, std::vector<std::pair<double, double>>> covered;
    for (const auto& w : adj) covered[{w.vertical, w.coord}].push_back({w.lo, w.hi});
    auto emit_uncovered = [&](bool vertical, double coord, double lo, double hi) {
        auto it = covered.find({vertical, coord});
        std::vector<std::pair<double, double>> cov;
        if (it != covered.end()) cov = it->second;
        std::sort(cov.begin(), cov.end());
        double cur = lo;
        for (const auto& [cl, ch] : cov) {
            if (ch <= cur) continue;
            if (cl >= hi) break;
            if (cl > cur) emit(vertical, coord, cur, std::min(cl, hi));
            cur = std::max(cur, ch);
            if (cur >= hi) break;
        }
        if (cur < hi) emit(vertical, coord, cur, hi);
    };
    for (const auto& tile : cd.tiles) {
        emit_uncovered(true, tile.x0, tile.y0, tile.y0 + tile.size);
        emit_uncovered(true, tile.x0 + tile.size, tile.y0, tile.y0 + tile.size);
        emit_uncovered(false, tile.y0, tile.x0, tile.x0 + tile.size);
        emit_uncovered(false, tile.y0 + tile.size, tile.x0, tile.x0 + tile.size);
    }

    return cd;
}

}  // namespace detail
}  // namespace rbmtrace::geom
