#pragma once

#include "hoikit/geometry/delaunay.h"
#include "hoikit/geometry/knn.h"
#include "hoikit/geometry/types.h"

namespace hoikit::geometry {

/// No tetrahedron survives the radius filter.
class EmptyComplexError : public Error {
 public:
  using Error::Error;
};

/// Boundary surface of the alpha complex: the Delaunay tetrahedra whose
/// circumradius is <= `alpha_radius`. Faces are oriented outward and the
/// normals are area-weighted vertex normals of the result.
///
/// `alpha_radius` is a length. Libraries that take the parameter as a radius
/// (as in "alpha = 0.1") map to it directly; libraries that use alpha as an
/// inverse radius map via alpha_radius = 1 / alpha.
ConciseMesh alpha_shape(const PointCloud& points, double alpha_radius);

/// Nearest-vertex queries plus the inside test against a concise mesh.
class SurfaceQuery {
 public:
  explicit SurfaceQuery(const ConciseMesh& mesh);

  const ConciseMesh& mesh() const { return *mesh_; }
  const KnnIndex& index() const { return index_; }

  Neighbor nearest(const Vec3& point) const { return index_.nearest(point); }

  /// True iff dot(n, point - v) < 0 for the nearest vertex v with normal n.
  bool is_inside(const Vec3& point) const;

 private:
  const ConciseMesh* mesh_;
  KnnIndex index_;
};

/// One-shot inside test; builds a throwaway index. Use SurfaceQuery in loops.
bool is_inside(const Vec3& point, const ConciseMesh& mesh);

inline constexpr std::size_t kDefaultConciseSamples = 2048;
inline constexpr double kDefaultAlphaRadius = 0.1;

/// Farthest point sampling (from index 0) down to `samples` points, or all
/// of them when fewer, followed by the alpha shape. source_indices refer to
/// `points`.
ConciseMesh build_concise_mesh(const std::vector<Vec3>& points, std::size_t samples = kDefaultConciseSamples,
                               double alpha_radius = kDefaultAlphaRadius);

/// Wraps a mesh as a ConciseMesh (normals + watertightness), keeping vertex
/// order; source_indices is the identity.
ConciseMesh make_concise(TriMesh mesh);

}  // namespace hoikit::geometry
