#pragma once

#include "hoikit/geometry/types.h"

#include <utility>

namespace hoikit::geometry {

struct VertexNormals {
  std::vector<Vec3> normals;
  /// Vertices without any non-degenerate incident face; their normal is zero.
  std::vector<std::uint32_t> isolated;
};

/// Area-weighted average of incident face normals, normalized per vertex.
/// Zero-area faces contribute nothing.
VertexNormals vertex_normals(const TriMesh& mesh);

struct WatertightReport {
  bool watertight = false;
  long euler_characteristic = 0;
  std::size_t edges = 0;
  std::size_t boundary_edges = 0;
};

/// Closed iff every undirected edge is used by exactly two faces traversing it
/// in opposite directions. Degenerate faces are ignored. The Euler
/// characteristic is V - E + F over all vertices and non-degenerate faces.
WatertightReport is_watertight(const TriMesh& mesh);

/// True when the face has (numerically) zero area.
bool is_degenerate(const TriMesh& mesh, const Face& face);

struct ParentLink {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  /// New vertex = (1 - weight) * a + weight * b.
  double weight = 0.5;
};

struct Upsampled {
  TriMesh mesh;
  /// Entry i describes vertex (original_count + i).
  std::vector<ParentLink> parents;
};

/// Splits the currently longest edge at its midpoint until the mesh has
/// `target` vertices. Each split adds exactly one vertex, original vertices
/// never move, and face winding is preserved. Ties between equally long
/// edges go to the lexicographically smallest (min, max) index pair.
Upsampled upsample_to_target(const TriMesh& mesh, std::size_t target);

}  // namespace hoikit::geometry
