#include "hoikit/geometry/alpha_shape.h"

#include "hoikit/geometry/mesh_ops.h"
#include "hoikit/geometry/predicates.h"
#include "hoikit/geometry/sampling.h"

#include <algorithm>
#include <map>

namespace hoikit::geometry {

ConciseMesh alpha_shape(const PointCloud& points, double alpha_radius) {
  if (!(alpha_radius > 0.0)) {
    throw InvalidArgument("alpha_shape: alpha radius must be positive");
  }
  const auto& pts = points.points;
  const auto cells = delaunay_tetrahedralize(pts);

  std::vector<Tetrahedron> kept;
  for (const auto& t : cells) {
    const double r = predicates::circumradius(pts[t.v[0]], pts[t.v[1]], pts[t.v[2]], pts[t.v[3]]);
    if (r <= alpha_radius) kept.push_back(t);
  }
  if (kept.empty()) {
    throw EmptyComplexError("alpha_shape: no tetrahedron has circumradius <= " +
                            std::to_string(alpha_radius));
  }

  // Outward faces of a positively oriented (a, b, c, d).
  auto outward = [](const Tetrahedron& t, int k) -> Face {
    const auto [a, b, c, d] = t.v;
    switch (k) {
      case 0: return {b, c, d};
      case 1: return {a, d, c};
      case 2: return {a, b, d};
      default: return {a, c, b};
    }
  };

  // A face is on the boundary iff exactly one kept tetrahedron uses it.
  std::map<std::array<std::uint32_t, 3>, std::pair<int, Face>> faces;
  for (const auto& t : kept) {
    for (int k = 0; k < 4; ++k) {
      const Face f = outward(t, k);
      std::array<std::uint32_t, 3> key = f;
      std::sort(key.begin(), key.end());
      auto [it, fresh] = faces.try_emplace(key, 0, f);
      ++it->second.first;
    }
  }

  ConciseMesh out;
  std::vector<std::int64_t> remap(pts.size(), -1);
  for (const auto& [key, entry] : faces) {
    if (entry.first != 1) continue;
    Face f = entry.second;
    for (auto& v : f) {
      if (remap[v] < 0) {
        remap[v] = static_cast<std::int64_t>(out.mesh.vertices.size());
        out.mesh.vertices.push_back(pts[v]);
        out.source_indices.push_back(v);
      }
      v = static_cast<std::uint32_t>(remap[v]);
    }
    out.mesh.faces.push_back(f);
  }
  out.normals = vertex_normals(out.mesh).normals;
  const auto report = is_watertight(out.mesh);
  out.watertight = report.watertight;
  out.euler_characteristic = report.euler_characteristic;
  return out;
}

ConciseMesh build_concise_mesh(const std::vector<Vec3>& points, std::size_t samples, double alpha_radius) {
  if (points.size() <= samples) return alpha_shape(PointCloud{points}, alpha_radius);
  const auto picked = farthest_point_sample(PointCloud{points}, samples);
  PointCloud subset;
  subset.points.reserve(picked.size());
  for (auto i : picked) subset.points.push_back(points[i]);
  ConciseMesh out = alpha_shape(subset, alpha_radius);
  for (auto& s : out.source_indices) s = picked[s];
  return out;
}

ConciseMesh make_concise(TriMesh mesh) {
  ConciseMesh out;
  out.mesh = std::move(mesh);
  out.normals = vertex_normals(out.mesh).normals;
  out.source_indices.resize(out.mesh.vertices.size());
  for (std::uint32_t i = 0; i < out.source_indices.size(); ++i) out.source_indices[i] = i;
  const auto report = is_watertight(out.mesh);
  out.watertight = report.watertight;
  out.euler_characteristic = report.euler_characteristic;
  return out;
}

SurfaceQuery::SurfaceQuery(const ConciseMesh& mesh) : mesh_(&mesh), index_(mesh.mesh.vertices) {}

bool SurfaceQuery::is_inside(const Vec3& point) const {
  const auto nn = index_.nearest(point);
  const auto& m = *mesh_;
  return m.normals[nn.index].dot(point - m.mesh.vertices[nn.index]) < 0.0;
}

bool is_inside(const Vec3& point, const ConciseMesh& mesh) {
  return SurfaceQuery(mesh).is_inside(point);
}

}  // namespace hoikit::geometry
