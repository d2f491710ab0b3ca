#pragma once

// Canonical test polyhedra.

#include <vector>

#include "wedgelab/geometry.hpp"

namespace shapes {

using wedgelab::vec3;
using wedgelab::geometry::convex_polyhedron;

inline convex_polyhedron box(vec3 lo, vec3 hi) {
    std::vector<vec3> v = {
        {lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {lo.x, hi.y, lo.z},
        {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z}};
    std::vector<std::vector<int>> f = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                       {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
    return convex_polyhedron::make(v, f);
}

inline convex_polyhedron unit_cube() { return box({0, 0, 0}, {1, 1, 1}); }

inline convex_polyhedron regular_tetrahedron(double edge) {
    double s = edge / std::sqrt(2.0);
    std::vector<vec3> v = {{s / 2, s / 2, s / 2},
                           {s / 2, -s / 2, -s / 2},
                           {-s / 2, s / 2, -s / 2},
                           {-s / 2, -s / 2, s / 2}};
    std::vector<std::vector<int>> f = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
    return convex_polyhedron::make(v, f);
}

}  // namespace shapes
