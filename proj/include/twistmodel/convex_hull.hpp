#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <vector>

#include "twistmodel/errors.hpp"

namespace twistmodel {

/// Closed convex triangle mesh. Facet indices refer to `vertices` and are
/// oriented outward; each facet is rotated so its smallest index comes
/// first and facets are sorted lexicographically, so equal point sets
/// produce identical hulls.
struct Hull3D {
    std::vector<Eigen::Vector3d> vertices;     // mm
    std::vector<std::array<int, 3>> facets;
};

/// Incremental (quickhull) convex hull of a 3D point set. Ties in the
/// farthest-point selection break toward the lowest input index. Throws
/// DegenerateInputError when fewer than 4 points are given or the cloud is
/// collinear/coplanar within 1e-6 mm.
Hull3D convex_hull_3d(std::span<const Eigen::Vector3d> points);

/// Hull volume in mm^3: signed-tetrahedron sum over facets taken from the
/// vertex centroid.
double hull_volume(const Hull3D& hull);

}  // namespace twistmodel
