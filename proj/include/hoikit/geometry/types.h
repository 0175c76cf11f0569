#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <vector>

namespace hoikit::geometry {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Face = std::array<std::uint32_t, 3>;

/// Indexed triangle surface. Faces keep the winding they were created with.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_faces() const { return faces.size(); }
  bool empty() const { return vertices.empty(); }
};

struct PointCloud {
  std::vector<Vec3> points;

  std::size_t size() const { return points.size(); }
};

/// Low-count surface used for normal-sensitive queries. `normals` are unit
/// length and `source_indices[i]` is the index of vertex i in the point set
/// the surface was reconstructed from.
struct ConciseMesh {
  TriMesh mesh;
  std::vector<Vec3> normals;
  std::vector<std::uint32_t> source_indices;
  bool watertight = false;
  long euler_characteristic = 0;
};

/// Throws InvalidArgument if a face index is out of range, a face repeats a
/// vertex or a coordinate is not finite.
void validate(const TriMesh& mesh);

/// Axis-aligned bounds; both corners are zero for an empty set.
struct Bounds {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 extent() const { return max - min; }
};

Bounds bounds_of(const std::vector<Vec3>& points);

}  // namespace hoikit::geometry
