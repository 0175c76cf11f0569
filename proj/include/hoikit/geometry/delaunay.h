#pragma once

#include "hoikit/error.h"
#include "hoikit/geometry/types.h"

namespace hoikit::geometry {

/// Input with duplicate points or without four non-coplanar points.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

struct Tetrahedron {
  std::array<std::uint32_t, 4> v;  ///< positively oriented
};

/// Incremental (Bowyer-Watson) 3D Delaunay tetrahedralization.
///
/// Predicates are exact. Degenerate configurations (four coplanar or five
/// cospherical points) are broken by evaluating every predicate on a copy of
/// the input displaced by a fixed, index-seeded offset of at most 1e-9 of the
/// bounding-box diagonal, so the result is a valid triangulation of the
/// convex hull and is fully reproducible.
std::vector<Tetrahedron> delaunay_tetrahedralize(const std::vector<Vec3>& points);

}  // namespace hoikit::geometry
