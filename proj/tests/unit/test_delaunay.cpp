#include "hoikit/geometry/alpha_shape.h"
#include "hoikit/geometry/delaunay.h"
#include "hoikit/geometry/mesh_ops.h"
#include "hoikit/geometry/predicates.h"
#include "hoikit/geometry/primitives.h"
#include "hoikit/geometry/sampling.h"
#include "support.h"

#include <doctest.h>

#include <set>

using namespace hoikit::geometry;
namespace pred = hoikit::geometry::predicates;

namespace {

double tet_volume(const std::vector<Vec3>& p, const Tetrahedron& t) {
  return (p[t.v[1]] - p[t.v[0]]).dot((p[t.v[2]] - p[t.v[0]]).cross(p[t.v[3]] - p[t.v[0]])) / 6.0;
}

// Volume enclosed by a closed, outward oriented surface (divergence theorem).
double enclosed_volume(const TriMesh& m) {
  double v = 0;
  for (const auto& f : m.faces) {
    v += m.vertices[f[0]].dot(m.vertices[f[1]].cross(m.vertices[f[2]])) / 6.0;
  }
  return v;
}

}  // namespace

TEST_CASE("predicates: orientation and insphere signs") {
  const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0), d(0, 0, 1);
  CHECK(pred::orient3d(a, b, c, d) == 1);
  CHECK(pred::orient3d(a, c, b, d) == -1);
  CHECK(pred::orient3d(a, b, c, Vec3(0.3, 0.3, 0)) == 0);
  CHECK(pred::insphere(a, b, c, d, Vec3(0.25, 0.25, 0.25)) == 1);
  CHECK(pred::insphere(a, b, c, d, Vec3(2, 2, 2)) == -1);
  // (1,1,1) lies on the circumsphere of the corner tetrahedron.
  CHECK(pred::insphere(a, b, c, d, Vec3(1, 1, 1)) == 0);
  CHECK(pred::circumradius(a, b, c, d) == doctest::Approx(std::sqrt(3.0) / 2));
}

TEST_CASE("predicates: exact fallback resolves near-degenerate orientation") {
  const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
  const Vec3 above(0.3, 0.3, 1e-300), below(0.3, 0.3, -1e-300);
  CHECK(pred::orient3d(a, b, c, above) == 1);
  CHECK(pred::orient3d(a, b, c, below) == -1);
}

TEST_CASE("delaunay: random points give a valid Delaunay tetrahedralization") {
  const auto pts = hoikit::test::random_points(150, 21);
  const auto tets = delaunay_tetrahedralize(pts);
  double volume = 0;
  for (const auto& t : tets) {
    CHECK(pred::orient3d(pts[t.v[0]], pts[t.v[1]], pts[t.v[2]], pts[t.v[3]]) == 1);
    volume += tet_volume(pts, t);
  }
  // Empty circumsphere property, brute force over all points.
  int violations = 0;
  for (const auto& t : tets) {
    for (std::uint32_t i = 0; i < pts.size(); ++i) {
      if (pred::insphere(pts[t.v[0]], pts[t.v[1]], pts[t.v[2]], pts[t.v[3]], pts[i]) > 0) ++violations;
    }
  }
  CHECK(violations == 0);
  // The union of tetrahedra is the convex hull.
  const auto hull = alpha_shape({pts}, 1e300);
  CHECK(hull.watertight);
  CHECK(volume == doctest::Approx(enclosed_volume(hull.mesh)).epsilon(1e-12));
  for (const auto& f : hull.mesh.faces) {
    for (const auto& p : pts) {
      CHECK(pred::orient3d(hull.mesh.vertices[f[0]], hull.mesh.vertices[f[1]],
                           hull.mesh.vertices[f[2]], p) <= 0);
    }
  }
}

TEST_CASE("delaunay: cube corners (cospherical, coplanar) tile the cube") {
  const auto cube = make_box({0, 0, 0}, {1, 1, 1});
  const auto tets = delaunay_tetrahedralize(cube.vertices);
  double volume = 0;
  for (const auto& t : tets) volume += std::abs(tet_volume(cube.vertices, t));
  CHECK(volume == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("delaunay: lattice input") {
  std::vector<Vec3> pts;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) pts.emplace_back(i, j, k);
  const auto tets = delaunay_tetrahedralize(pts);
  double volume = 0;
  for (const auto& t : tets) volume += std::abs(tet_volume(pts, t));
  CHECK(volume == doctest::Approx(27.0).epsilon(1e-9));
}

TEST_CASE("delaunay: degenerate inputs") {
  CHECK_THROWS_AS(delaunay_tetrahedralize({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}), DegenerateInputError);
  CHECK_THROWS_AS(delaunay_tetrahedralize({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {2, 3, 0}}),
                  DegenerateInputError);
  CHECK_THROWS_AS(delaunay_tetrahedralize({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 0}}),
                  DegenerateInputError);
}

TEST_CASE("alpha_shape: regular tetrahedron with large alpha is its hull") {
  const std::vector<Vec3> pts{{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  const auto shape = alpha_shape({pts}, 100.0);
  CHECK(shape.mesh.faces.size() == 4);
  CHECK(shape.watertight);
  CHECK(shape.euler_characteristic == 2);
  std::set<std::set<std::uint32_t>> faces;
  for (const auto& f : shape.mesh.faces) {
    std::set<std::uint32_t> s;
    for (auto v : f) s.insert(shape.source_indices[v]);
    faces.insert(s);
  }
  CHECK(faces == std::set<std::set<std::uint32_t>>{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}});
  // Outward: normals point away from the centroid (origin).
  for (std::size_t i = 0; i < shape.normals.size(); ++i) {
    CHECK(shape.normals[i].dot(shape.mesh.vertices[i]) > 0);
    CHECK(std::abs(shape.normals[i].norm() - 1.0) < 1e-6);
  }
}

TEST_CASE("alpha_shape: FPS sphere sample is watertight with Euler characteristic 2") {
  const auto dense = make_icosphere(1.0, 5);  // 10242 vertices
  const auto idx = farthest_point_sample({dense.vertices}, 2048);
  PointCloud sample;
  for (auto i : idx) sample.points.push_back(dense.vertices[i]);
  const auto shape = alpha_shape(sample, 1.5);
  CHECK(shape.watertight);
  CHECK(shape.euler_characteristic == 2);
  CHECK(shape.mesh.vertices.size() == 2048);
  for (std::size_t i = 0; i < shape.normals.size(); ++i) {
    CHECK(shape.normals[i].dot(shape.mesh.vertices[i]) > 0.99);
  }
}

TEST_CASE("alpha_shape: vanishing alpha yields the empty-complex error") {
  const auto pts = hoikit::test::random_sphere_points(300, 3, 1.0);
  CHECK_THROWS_AS(alpha_shape({pts}, 1e-6), EmptyComplexError);
  CHECK_THROWS_AS(alpha_shape({pts}, 0.0), hoikit::InvalidArgument);
}

TEST_CASE("alpha_shape: concave solid keeps its cavity at moderate alpha") {
  // Points filling an L-shaped solid on a jittered lattice.
  std::vector<Vec3> pts;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> j(-0.02, 0.02);
  for (int x = 0; x <= 8; ++x)
    for (int y = 0; y <= 8; ++y)
      for (int z = 0; z <= 2; ++z) {
        if (x > 4 && y > 4) continue;
        pts.emplace_back(0.1 * x + j(rng), 0.1 * y + j(rng), 0.1 * z + j(rng));
      }
  const auto shape = alpha_shape({pts}, 0.12);
  CHECK(shape.mesh.faces.size() > 0);
  // The notch corner (0.75, 0.75) lies outside the reconstructed solid.
  const SurfaceQuery q(shape);
  CHECK_FALSE(q.is_inside({0.75, 0.75, 0.1}));
  CHECK(q.is_inside({0.2, 0.2, 0.1}));
}
