#pragma once

#include <cstdint>
#include <vector>

#include "rbmtrace/geom/segment_grid.hpp"
#include "rbmtrace/geom/vec2.hpp"

namespace rbmtrace::geom::detail {

/// Internal layout of a corridor domain: quadtree tiling of the
/// complement of the fat-Cantor product, plus the slit openings that
/// join adjacent rooms into one simply connected domain.
struct CorridorData {
    struct Node {
        double x0, y0, size;
        int child[4] = {-1, -1, -1, -1};  // SW, SE, NW, NE
        int tile = -1;                    // >= 0 for white leaves
        bool black = false;
    };
    struct Tile {
        double x0, y0, size;
        int depth;
    };
    struct Slit {
        bool vertical;        // wall direction: true = wall along x = coord
        double coord;         // wall line coordinate
        double gap_lo, gap_hi;  // open interval of the slit along the wall
    };

    std::vector<Node> nodes;
    std::vector<Tile> tiles;
    std::vector<Slit> slits;
    int largest_tile = 0;
    int generations = 0;
    double width_exponent = 0.0;

    /// Leaf index for p (quadtree descent; half-open cell convention).
    int locate_leaf(const Vec2& p) const {
        int n = 0;
        while (nodes[n].tile < 0 && !nodes[n].black) {
            const Node& nd = nodes[n];
            const double cx = nd.x0 + nd.size * 0.5;
            const double cy = nd.y0 + nd.size * 0.5;
            n = nd.child[(p.x >= cx ? 1 : 0) + (p.y >= cy ? 2 : 0)];
        }
        return n;
    }

    /// True iff p lies strictly inside a white tile.
    bool strictly_in_tile(const Vec2& p) const {
        if (p.x <= 0.0 || p.x >= 1.0 || p.y <= 0.0 || p.y >= 1.0) return false;
        const Node& leaf = nodes[locate_leaf(p)];
        if (leaf.tile < 0) return false;
        return p.x > leaf.x0 && p.x < leaf.x0 + leaf.size && p.y > leaf.y0 &&
               p.y < leaf.y0 + leaf.size;
    }
};

/// Builds the tiling, slits and boundary soup. Throws
/// std::invalid_argument when the slit graph cannot connect all tiles.
CorridorData build_corridor(int generations, double width_exponent,
                            std::vector<Segment>& boundary_out);

}  // namespace rbmtrace::geom::detail
