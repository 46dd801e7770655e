#pragma once

#include <cmath>
#include <stdexcept>

#include "rbmtrace/geom/vec2.hpp"

namespace rbmtrace::geom {

/// Point in the ambient space of a domain. dim is 2 (planar) or 3
/// (product domains); z is ignored when dim == 2.
struct Point {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    int dim = 2;

    static Point planar(double x, double y) { return {x, y, 0.0, 2}; }
    static Point spatial(double x, double y, double z) { return {x, y, z, 3}; }
    static Point from_xy(const Vec2& v) { return {v.x, v.y, 0.0, 2}; }

    Vec2 xy() const { return {x, y}; }

    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && (dim == 2 || std::isfinite(z));
    }

    double operator[](int i) const {
        switch (i) {
            case 0: return x;
            case 1: return y;
            case 2: return z;
            default: throw std::out_of_range("Point index");
        }
    }
};

using PlanarPoint = Point;  // dim == 2
using SpacePoint = Point;   // dim == 3

}  // namespace rbmtrace::geom
