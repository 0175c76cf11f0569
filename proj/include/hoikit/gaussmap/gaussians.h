#pragma once

#include "hoikit/geometry/types.h"

#include <Eigen/Geometry>

#include <filesystem>

namespace hoikit::gaussmap {

using geometry::Vec3;

/// Opacity floors: object Gaussians never drop below 0.5, hand Gaussians
/// stay fully opaque.
inline constexpr double kObjectMinOpacity = 0.5;
inline constexpr double kHandMinOpacity = 1.0;

/// Per-element Gaussian attributes stored as parallel arrays.
struct GaussianSet {
  std::vector<Vec3> positions;
  std::vector<Vec3> scales;
  std::vector<Vec3> colors;
  std::vector<double> opacities;
  std::vector<Eigen::Quaterniond> orientations;
  double min_opacity = kObjectMinOpacity;

  std::size_t size() const { return positions.size(); }

  /// Throws InvalidArgument when the arrays disagree in length, a scale is
  /// not positive, a quaternion is not unit, or an opacity leaves
  /// [min_opacity, 1].
  void validate() const;
};

/// One-to-one binding: vertex i of the reference mesh is Gaussian i.
/// `reference` keeps the vertex positions at binding time (the V of the
/// position Laplacian term).
struct VertexGaussianMap {
  std::vector<Vec3> reference;
  std::vector<geometry::Face> faces;

  std::size_t size() const { return reference.size(); }
  std::size_t gaussian_of(std::size_t vertex) const { return vertex; }
  std::size_t vertex_of(std::size_t gaussian) const { return gaussian; }
};

struct BoundGaussians {
  GaussianSet gaussians;
  VertexGaussianMap map;
};

/// Places one Gaussian on every vertex: isotropic scale of half the mean
/// incident edge length, 0.5 gray, opacity = min_opacity, identity rotation.
BoundGaussians bind_vertices(const geometry::TriMesh& mesh, double min_opacity);

/// Binary little-endian PLY, one `vertex` element with double properties in
/// this order: x y z scale_x scale_y scale_z red green blue opacity
/// quat_w quat_x quat_y quat_z.
void save_gaussians(const GaussianSet& set, const std::filesystem::path& path);
GaussianSet load_gaussians(const std::filesystem::path& path, double min_opacity);

}  // namespace hoikit::gaussmap
