#pragma once

#include "orbinspect/common.hpp"

#include <array>
#include <span>

namespace orbinspect::geometry {

struct ConvexHull {
    std::vector<std::size_t> vertices;                 ///< sorted input indices on the hull
    std::vector<std::array<std::size_t, 3>> faces;     ///< outward (counter-clockwise) triangles
};

/// Coplanarity tolerance: 1e-9 times the bounding-box diagonal.
double default_hull_epsilon(std::span<const Vec3> points);

/// 3D quickhull. Throws HullDegenerate when the input spans fewer than three
/// dimensions (within `epsilon`; negative selects the default).
ConvexHull quickhull(std::span<const Vec3> points, double epsilon = -1.0);

/// Extreme points of any input, including coplanar, collinear and coincident
/// sets (2D monotone chain or segment endpoints).
std::vector<std::size_t> hull_vertex_indices(std::span<const Vec3> points, double epsilon = -1.0);

}  // namespace orbinspect::geometry
