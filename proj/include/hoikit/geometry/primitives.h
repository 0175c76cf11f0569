#pragma once

#include "hoikit/geometry/types.h"

namespace hoikit::geometry {

/// Icosahedron refined by `subdivisions` rounds of 1-to-4 midpoint splits,
/// projected to the sphere. 10 * 4^s + 2 vertices, outward winding.
TriMesh make_icosphere(double radius, int subdivisions, const Vec3& center = Vec3::Zero());

/// Closed box with 12 outward triangles. Corner i has coordinates
/// (i & 1 ? max.x : min.x, i & 2 ? max.y : min.y, i & 4 ? max.z : min.z).
/// Face diagonals avoid corners 0 and 7.
TriMesh make_box(const Vec3& min, const Vec3& max);

}  // namespace hoikit::geometry
